//! Conversions between user-facing units (ns, MHz as quantity/2π) and the
//! internal ones (µs, rad/µs).

use std::f64::consts::TAU;

pub fn mhz_to_rad_per_us(mhz: f64) -> f64 {
    TAU * mhz
}

pub fn rad_per_us_to_mhz(w: f64) -> f64 {
    w / TAU
}

pub fn ns_to_us(ns: f64) -> f64 {
    ns * 1e-3
}

pub fn us_to_ns(us: f64) -> f64 {
    us * 1e3
}
