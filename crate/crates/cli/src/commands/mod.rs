pub mod lpp;
pub mod martingale;
pub mod simulate;
pub mod strip_compare;
pub mod trace;
pub mod virasoro_check;
pub mod weights;
