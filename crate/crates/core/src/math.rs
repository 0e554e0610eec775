//! Small exact integer helpers shared by the cost formulas and the builders.

/// `⌈a / b⌉` for `b > 0`.
pub fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// `⌈log2 x⌉`, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Number of bits needed to hold `x` (`bit_length(0) = 0`).
pub fn bit_length(x: u64) -> u32 {
    64 - x.leading_zeros()
}

pub fn is_power_of_two(x: u64) -> bool {
    x != 0 && x & (x - 1) == 0
}

/// `⌈log2 x⌉` for a positive real, robust to values that are exact powers of two.
pub fn ceil_log2_f64(x: f64) -> i64 {
    let l = x.log2();
    let r = l.round();
    if (l - r).abs() < 1e-12 {
        r as i64
    } else {
        l.ceil() as i64
    }
}
