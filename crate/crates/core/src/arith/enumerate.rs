use super::matrix::ExponentMatrix;

/// Every integer symmetric psd `n×n` matrix with trace at most `bound`, each
/// exactly once, in ascending key order.
pub fn enumerate_psd_exponents(n: usize, bound: u64) -> Vec<ExponentMatrix> {
    let bound = bound as i64;
    let mut out = Vec::new();
    let mut diag = vec![0i64; n];
    enumerate_diagonals(0, bound, &mut diag, &mut |d| {
        let mut e = ExponentMatrix::diagonal(d);
        fill_off_diagonal(&mut e, 0, 1, &mut out);
    });
    out.sort();
    out
}

fn enumerate_diagonals(i: usize, remaining: i64, diag: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
    if i == diag.len() {
        f(diag);
        return;
    }
    for v in 0..=remaining {
        diag[i] = v;
        enumerate_diagonals(i + 1, remaining - v, diag, f);
    }
    diag[i] = 0;
}

fn fill_off_diagonal(e: &mut ExponentMatrix, i: usize, j: usize, out: &mut Vec<ExponentMatrix>) {
    let n = e.size();
    if i + 1 >= n {
        if e.is_psd() {
            out.push(e.clone());
        }
        return;
    }
    let (ni, nj) = if j + 1 < n {
        (i, j + 1)
    } else {
        (i + 1, i + 2)
    };
    let prod = e.get(i, i) * e.get(j, j);
    let lim = (prod as f64).sqrt().floor() as i64 + 1;
    for v in -lim..=lim {
        if v * v > prod {
            continue;
        }
        e.set(i, j, v);
        fill_off_diagonal(e, ni, nj, out);
    }
    e.set(i, j, 0);
}
