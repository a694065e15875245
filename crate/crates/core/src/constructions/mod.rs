//! Named forms built from theta constants, exact and numerical.

mod delta;
mod f12;
mod named;
mod numeric;
mod scan;

pub use delta::{delta_compare, delta_eta_product, delta_series, proportionality, DeltaReport};
pub use f12::{verify_f12_restriction, F12Report};
pub use named::{
    construct_named, estimate_key_count, graded_product_of, product_of, theta_set_power,
    theta_set_power_window, theta_valuation, CostEstimate, FormKind, NamedForm,
    HYPERELLIPTIC_SET_SIZE_GENUS_4, KEY_COUNT_LIMIT,
};
pub use numeric::{
    defining_evens, eval_named_numeric, scan_common_zeros, FormRecord, NumericForm, NumericValue,
    PointRecord, ScanReport,
};
pub use scan::{
    acn3_scan, acn4_scan, check_split, reducible_sample_points, FamilyPoint, FamilyScanReport,
    SampleBox, SAMPLE_DOMAIN_PARAMETER,
};
