//! Reference face tables for the first triple projection at the x-, y- and
//! z-levels: each double-space face (or `interior`) with the triple-space
//! faces mapped into it.  These are ground truth for verification only; the
//! projections themselves are computed from blowup data.

pub type Table = &'static [(&'static str, &'static [&'static str])];

pub const X_LEVEL: Table = &[
    ("interior", &["H_1"]),
    ("rf", &["H_3", "E_{2,x}"]),
    ("lf", &["H_2", "E_{3,x}"]),
    ("ff_x", &["V_x", "E_{1,x}"]),
];

pub const Y_LEVEL: Table = &[
    ("interior", &["H_1"]),
    ("rf", &["H_3", "E_{2,x}", "E_{2,y}"]),
    ("lf", &["H_2", "E_{3,x}", "E_{3,y}"]),
    ("ff_yx", &["V_x", "E_{1,x}", "G_{2,y}", "G_{3,y}"]),
    ("ff_y", &["V_y", "E_{1,y}", "G_{1,y}"]),
];

pub const Z_LEVEL: Table = &[
    ("interior", &["H_1"]),
    ("rf", &["H_3", "E_{2,x}", "E_{2,y}", "E_{2,z}"]),
    ("lf", &["H_2", "E_{3,x}", "E_{3,y}", "E_{3,z}"]),
    ("ff_zx", &["V_x", "E_{1,x}", "G_{2,y}", "G_{2,z}", "G_{3,y}", "G_{3,z}"]),
    ("ff_zy", &["V_y", "E_{1,y}", "G_{1,y}", "F_{2,z}", "F_{3,z}"]),
    ("ff_z", &["V_z", "E_{1,z}", "G_{1,z}", "F_{1,z}"]),
];

/// Table for the given depth (0, 1 or 2).
pub fn table(k: usize) -> Option<Table> {
    match k {
        0 => Some(X_LEVEL),
        1 => Some(Y_LEVEL),
        2 => Some(Z_LEVEL),
        _ => None,
    }
}
