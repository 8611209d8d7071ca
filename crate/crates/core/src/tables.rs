//! Reference data: the obstruction classes on `[7, 8]`, their lattice
//! triangles, the hidden classes, the finite list of short classes, and the
//! degree bounds for the searches on `[7, 8]`.
//!
//! Decimal columns are kept as the printed strings; everything else is exact.

use crate::classes::ExceptionalClass;
use crate::num::{ratio, Rational};

/// A class governing `c` on an interval `[u, v]` around its centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObstructionRow {
    /// Centre as `(p, q)`.
    pub center: (i64, i64),
    pub class: &'static str,
    /// `dμ(z) = A + Bz` just below the centre.
    pub ab: (i64, i64),
    /// `dμ(z) = A′ + B′z` just above the centre.
    pub ab_prime: (i64, i64),
    /// Printed decimal endpoints.
    pub u: &'static str,
    pub v: &'static str,
    /// `μ` at the centre as `(p, q)`.
    pub mu: (i64, i64),
    /// `μ − √a` at the centre, in units of `10⁻⁶`.
    pub gap_micro: &'static str,
}

/// The eight classes that determine `c` on `[7 1/9, 8]` away from `√a`.
pub const OBSTRUCTION_TABLE: [ObstructionRow; 8] = [
    ObstructionRow { center: (57, 8), class: "48;18^7,3,2^7", ab: (7, 17), ab_prime: (121, 1), u: "7.12499", v: "7.12501", mu: (1025, 384), gap_micro: "1.27" },
    ObstructionRow { center: (107, 15), class: "64;24^7,3^7,1^2", ab: (14, 22), ab_prime: (121, 7), u: "7.1333", v: "7.1334", mu: (641, 240), gap_micro: "3.25" },
    ObstructionRow { center: (50, 7), class: "24;9^7,2,1^6", ab: (7, 8), ab_prime: (57, 1), u: "7.1428", v: "7.1429", mu: (449, 168), gap_micro: "6.63" },
    ObstructionRow { center: (93, 13), class: "40;15^7,2^6,1^2", ab: (14, 13), ab_prime: (107, 0), u: "7.151", v: "7.156", mu: (107, 40), gap_micro: "332.5" },
    ObstructionRow { center: (36, 5), class: "16;6^7,1^5", ab: (7, 5), ab_prime: (43, 0), u: "7.1665", v: "7.22", mu: (43, 16), gap_micro: "4218.4" },
    ObstructionRow { center: (29, 4), class: "35;13^7,4,3^3", ab: (0, 13), ab_prime: (87, 1), u: "7.2485", v: "7.252", mu: (377, 140), gap_micro: "274.7" },
    ObstructionRow { center: (15, 2), class: "8;3^7,1^2", ab: (7, 2), ab_prime: (22, 0), u: "7.328", v: "7.56", mu: (11, 4), gap_micro: "11387.2" },
    ObstructionRow { center: (8, 1), class: "6;3,2^7", ab: (1, 2), ab_prime: (17, 0), u: "7.97", v: "8.03", mu: (17, 6), gap_micro: "4906.2" },
];

/// A lattice triangle matched to a class: `N(A,B) = ½(d+1)(d+2) + s − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeRow {
    pub center: (i64, i64),
    pub class: &'static str,
    pub ab: (i64, i64),
    pub ab_prime: (i64, i64),
    pub count: i64,
    pub s: i64,
    pub n_of_d: i64,
}

/// The nine classes contributing to `c` on `[7, 8]` with their triangles.
pub const LATTICE_TABLE: [LatticeRow; 9] = [
    LatticeRow { center: (7, 1), class: "3;2,1^6", ab: (1, 1), ab_prime: (8, 0), count: 11, s: 2, n_of_d: 11 },
    LatticeRow { center: (57, 8), class: "48;18^7,3,2^7", ab: (7, 17), ab_prime: (121, 1), count: 1227, s: 3, n_of_d: 1227 },
    LatticeRow { center: (107, 15), class: "64;24^7,3^7,1^2", ab: (14, 22), ab_prime: (121, 7), count: 2146, s: 2, n_of_d: 2146 },
    LatticeRow { center: (50, 7), class: "24;9^7,2,1^6", ab: (7, 8), ab_prime: (57, 1), count: 326, s: 2, n_of_d: 326 },
    LatticeRow { center: (93, 13), class: "40;15^7,2^6,1^2", ab: (14, 13), ab_prime: (107, 0), count: 862, s: 2, n_of_d: 862 },
    LatticeRow { center: (36, 5), class: "16;6^7,1^5", ab: (7, 5), ab_prime: (43, 0), count: 154, s: 2, n_of_d: 154 },
    LatticeRow { center: (29, 4), class: "35;13^7,4,3^3", ab: (0, 13), ab_prime: (87, 1), count: 669, s: 4, n_of_d: 669 },
    LatticeRow { center: (15, 2), class: "8;3^7,1^2", ab: (7, 2), ab_prime: (22, 0), count: 46, s: 2, n_of_d: 46 },
    LatticeRow { center: (8, 1), class: "6;3,2^7", ab: (1, 2), ab_prime: (17, 0), count: 30, s: 3, n_of_d: 30 },
];

/// A class with `μ = c` only at its centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HiddenRow {
    pub center: (i64, i64),
    pub class: &'static str,
    pub ab: (i64, i64),
    pub ab_prime: (i64, i64),
    pub mu: (i64, i64),
    pub count: i64,
    pub s: i64,
}

/// The four hidden classes on `[7, 8]`.
pub const HIDDEN_TABLE: [HiddenRow; 4] = [
    HiddenRow { center: (57, 8), class: "384;144^6,143,18^8", ab: (-1, 144), ab_prime: (1025, 0), mu: (1025, 384), count: 74322, s: 18 },
    HiddenRow { center: (50, 7), class: "168;63^6,62,9^7", ab: (-1, 63), ab_prime: (449, 0), mu: (449, 168), count: 14373, s: 9 },
    HiddenRow { center: (43, 6), class: "96;36^6,35,6^6", ab: (-1, 36), ab_prime: (257, 0), mu: (257, 96), count: 4758, s: 6 },
    HiddenRow { center: (22, 3), class: "24;9^6,8,3^3", ab: (-1, 9), ab_prime: (65, 0), mu: (65, 24), count: 327, s: 3 },
];

/// The classes obstructive at `7 + 1/k` with matching length, `k = 1, …, 8`.
pub const SEVEN_PLUS_ONE_OVER_K: [(i64, &str); 10] = [
    (8, "48;18^7,3,2^7"),
    (8, "384;144^6,143,18^8"),
    (7, "24;9^7,2,1^6"),
    (7, "168;63^6,62,9^7"),
    (6, "96;36^6,35,6^6"),
    (5, "16;6^7,1^5"),
    (4, "35;13^7,4,3^3"),
    (3, "24;9^6,8,3^3"),
    (2, "8;3^7,1^2"),
    (1, "6;3,2^7"),
];

/// The members of `E` of length at most 8.
pub const SHORT_CLASSES: [&str; 7] = ["0;-1", "1;1,1", "2;1^5", "3;2,1^6", "4;2^3,1^5", "5;2^6,1,1", "6;3,2^7"];

/// `D(z_k)` for `k = 1, …, 8`: degree bound for the point searches at `z_k`.
pub const POINT_BOUNDS: [i64; 8] = [75, 69, 73, 79, 86, 92, 98, 104];

/// `D_k` for `k = 1, …, 8`: degree bound for the interval searches.
pub const INTERVAL_BOUNDS: [i64; 8] = [66, 64, 56, 61, 67, 74, 81, 88];

/// `(D(z_k), D_k)` for `k ∈ 1..=8`.
pub fn default_bounds(k: i64) -> Option<(i64, i64)> {
    (1..=8).contains(&k).then(|| (POINT_BOUNDS[(k - 1) as usize], INTERVAL_BOUNDS[(k - 1) as usize]))
}

/// `z_k = 7 + 2/(2k+1)`.
pub fn z_point(k: i64) -> Rational {
    ratio(14 * k + 9, 2 * k + 1)
}

/// Parses a class literal from the tables.
pub fn class(text: &str) -> ExceptionalClass {
    text.parse().expect("table class literals are well formed")
}

/// A table centre as a rational.
pub fn center(pq: (i64, i64)) -> Rational {
    ratio(pq.0, pq.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::is_diophantine;

    #[test]
    fn table_classes_are_diophantine() {
        for row in OBSTRUCTION_TABLE {
            assert!(is_diophantine(&class(row.class)), "{}", row.class);
        }
        for row in HIDDEN_TABLE {
            assert!(is_diophantine(&class(row.class)), "{}", row.class);
        }
        for s in SHORT_CLASSES {
            assert!(is_diophantine(&class(s)), "{s}");
        }
    }

    #[test]
    fn bounds_and_points() {
        assert_eq!(default_bounds(8), Some((104, 88)));
        assert_eq!(default_bounds(4), Some((79, 61)));
        assert_eq!(default_bounds(1), Some((75, 66)));
        assert_eq!(default_bounds(0), None);
        assert_eq!(z_point(6), ratio(93, 13));
        assert_eq!(z_point(7), ratio(107, 15));
    }
}
