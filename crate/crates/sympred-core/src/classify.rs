//! Topology labels for the quadric and its reduced quotient.
//!
//! Pure table lookup on (case tag, signature, level sign). The catalog is
//! finite and frozen; labels substitute concrete integers (so "S^3", not
//! "S^{2n+1}") and use ASCII "x" for products and "U" for disjoint unions.
//! Level normalization: the level-(-1) quadric of signature (p,q) is the
//! level-(+1) quadric of the sign-flipped signature.

use crate::error::{Error, Result};
use crate::generator::{CaseTag, Generator};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionGroup {
    U1,
    R,
}

impl core::fmt::Display for ReductionGroup {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ReductionGroup::U1 => write!(f, "U(1)"),
            ReductionGroup::R => write!(f, "R"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationLabel {
    pub quadric: String,
    pub quotient: String,
    pub group: ReductionGroup,
    /// Set on boundary rows whose label is extrapolated from the generic
    /// range rather than stated outright.
    pub note: Option<String>,
}

/// "R^k" factor, dropped when k = 0.
fn r_factor(k: usize) -> Option<String> {
    if k == 0 {
        None
    } else {
        Some(format!("R^{k}"))
    }
}

fn product(factors: Vec<Option<String>>) -> String {
    let present: Vec<String> = factors.into_iter().flatten().collect();
    if present.is_empty() {
        String::from("point")
    } else {
        present.join(" x ")
    }
}

/// Two disjoint copies of R^k; collapses to "2 points" for k = 0.
fn union_two(k: usize) -> String {
    if k == 0 {
        String::from("2 points")
    } else {
        format!("R^{k} U R^{k}")
    }
}

pub fn classify_quotient(gen: &Generator, mu0: f64) -> Result<ClassificationLabel> {
    if mu0 == 0.0 || !mu0.is_finite() {
        return Err(Error::InvalidInput(format!("level must be finite and nonzero, got {mu0}")));
    }
    let n = gen.n();
    match gen.case_tag() {
        CaseTag::CaseMinusId => {
            if mu0 != 1.0 && mu0 != -1.0 {
                return Err(Error::UnsupportedClassification(format!(
                    "catalog covers levels +1 and -1 for the A^2 = -Id family, got {mu0}"
                )));
            }
            // Level -1 of signature (p,q) is level +1 of signature (q,p).
            let (p, q) = if mu0 == 1.0 {
                (gen.p(), gen.q())
            } else {
                (gen.q(), gen.p())
            };
            if p == 0 {
                return Err(Error::UnsupportedClassification(
                    "empty quadric: the quadratic form is negative definite at this level".into(),
                ));
            }
            let label = if p == n + 1 {
                ClassificationLabel {
                    quadric: format!("S^{}", 2 * n + 1),
                    quotient: format!("CP^{n}"),
                    group: ReductionGroup::U1,
                    note: None,
                }
            } else if p == 1 {
                ClassificationLabel {
                    quadric: product(alloc::vec![
                        Some(String::from("S^1")),
                        r_factor(2 * q),
                    ]),
                    quotient: format!("C^{n}"),
                    group: ReductionGroup::U1,
                    note: None,
                }
            } else {
                ClassificationLabel {
                    quadric: product(alloc::vec![
                        Some(format!("S^{}", 2 * p - 1)),
                        r_factor(2 * q),
                    ]),
                    quotient: format!("rank-{q} complex vector bundle over CP^{}", p - 1),
                    group: ReductionGroup::U1,
                    note: if p == n {
                        Some(String::from(
                            "boundary signature p = n labeled by the generic bundle form",
                        ))
                    } else {
                        None
                    },
                }
            };
            Ok(label)
        }
        CaseTag::CasePlusId => {
            if mu0 != -2.0 {
                return Err(Error::UnsupportedClassification(format!(
                    "catalog fixes level -2 for the A^2 = +Id family, got {mu0}"
                )));
            }
            Ok(ClassificationLabel {
                quadric: format!("{{ sum_{{i=1..{}}} x^i y^i = 1 }}", n + 1),
                quotient: format!("T S^{n}"),
                group: ReductionGroup::R,
                note: None,
            })
        }
        CaseTag::CaseNilpotent => {
            if mu0 != 1.0 && mu0 != -1.0 {
                return Err(Error::UnsupportedClassification(format!(
                    "catalog covers levels +1 and -1 for the nilpotent family, got {mu0}"
                )));
            }
            let p = gen.p();
            // Flipping the level flips every epsilon sign: q -> p - q.
            let q = if mu0 == 1.0 { gen.q() } else { p - gen.q() };
            if q == 0 {
                return Err(Error::UnsupportedClassification(
                    "empty quadric: the (degenerate) quadratic form is nonpositive at this level".into(),
                ));
            }
            let d = 2 * n + 2;
            let label = if p == 1 {
                // q = 1: two affine hyperplanes.
                ClassificationLabel {
                    quadric: format!("2 points x R^{}", d - 1),
                    quotient: union_two(2 * n),
                    group: ReductionGroup::R,
                    note: None,
                }
            } else if q == 1 {
                ClassificationLabel {
                    quadric: format!("({}) x R^{}", union_two(p - 1), d - p),
                    quotient: product(alloc::vec![
                        Some(format!("({})", union_two(p - 1))),
                        r_factor(p - 1),
                        r_factor(d - 2 * p),
                    ]),
                    group: ReductionGroup::R,
                    note: None,
                }
            } else {
                let (base, tbase) = if p == q {
                    (format!("S^{}", q - 1), format!("T S^{}", q - 1))
                } else {
                    (
                        format!("(S^{} x R^{})", q - 1, p - q),
                        format!("T(S^{} x R^{})", q - 1, p - q),
                    )
                };
                ClassificationLabel {
                    quadric: product(alloc::vec![Some(base), r_factor(d - p)]),
                    quotient: product(alloc::vec![Some(tbase), r_factor(d - 2 * p)]),
                    group: ReductionGroup::R,
                    note: None,
                }
            };
            Ok(label)
        }
        CaseTag::CaseRemark => {
            if mu0 != 1.0 {
                return Err(Error::UnsupportedClassification(format!(
                    "catalog fixes level +1 for the complex-eigenvalue family, got {mu0}"
                )));
            }
            Ok(ClassificationLabel {
                quadric: String::from("S^1 x R^2"),
                quotient: String::from("cylinder S^1 x R"),
                group: ReductionGroup::R,
                note: None,
            })
        }
        CaseTag::Explicit => Err(Error::UnsupportedClassification(
            "no catalog entry for explicit generators".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minus_id(n: usize, p: usize) -> Generator {
        Generator::make_case_minus_id(n, p).unwrap()
    }

    fn nilpotent(n: usize, p: usize, q: usize) -> Generator {
        Generator::make_case_nilpotent(n, p, q).unwrap()
    }

    #[test]
    fn definite_signature_gives_sphere_over_projective_space() {
        let l = classify_quotient(&minus_id(1, 2), 1.0).unwrap();
        assert_eq!(l.quadric, "S^3");
        assert_eq!(l.quotient, "CP^1");
        assert_eq!(l.group, ReductionGroup::U1);
        let l = classify_quotient(&minus_id(2, 3), 1.0).unwrap();
        assert_eq!((l.quadric.as_str(), l.quotient.as_str()), ("S^5", "CP^2"));
    }

    #[test]
    fn rank_one_signature_gives_complex_affine_space() {
        let l = classify_quotient(&minus_id(2, 1), 1.0).unwrap();
        assert_eq!(l.quadric, "S^1 x R^4");
        assert_eq!(l.quotient, "C^2");
    }

    #[test]
    fn middle_signatures_give_bundles_with_boundary_note() {
        let l = classify_quotient(&minus_id(3, 2), 1.0).unwrap();
        assert_eq!(l.quadric, "S^3 x R^4");
        assert_eq!(l.quotient, "rank-2 complex vector bundle over CP^1");
        assert!(l.note.is_none());
        let l = classify_quotient(&minus_id(2, 2), 1.0).unwrap();
        assert_eq!(l.quotient, "rank-1 complex vector bundle over CP^1");
        assert!(l.note.is_some());
    }

    #[test]
    fn negative_level_swaps_the_signature() {
        let l = classify_quotient(&minus_id(1, 0), -1.0).unwrap();
        assert_eq!((l.quadric.as_str(), l.quotient.as_str()), ("S^3", "CP^1"));
    }

    #[test]
    fn definite_form_at_the_wrong_level_is_empty() {
        let err = classify_quotient(&minus_id(1, 0), 1.0).unwrap_err();
        assert!(format!("{err}").contains("empty"));
        let err = classify_quotient(&minus_id(1, 2), -1.0).unwrap_err();
        assert!(format!("{err}").contains("empty"));
    }

    #[test]
    fn lagrangian_family_is_the_tangent_bundle_of_the_sphere() {
        let g = Generator::make_case_plus_id(1).unwrap();
        let l = classify_quotient(&g, -2.0).unwrap();
        assert_eq!(l.quadric, "{ sum_{i=1..2} x^i y^i = 1 }");
        assert_eq!(l.quotient, "T S^1");
        assert_eq!(l.group, ReductionGroup::R);
        let g = Generator::make_case_plus_id(3).unwrap();
        assert_eq!(classify_quotient(&g, -2.0).unwrap().quotient, "T S^3");
        assert!(classify_quotient(&g, 1.0).is_err());
    }

    #[test]
    fn nilpotent_rank_one_is_two_hyperplanes() {
        let l = classify_quotient(&nilpotent(1, 1, 1), 1.0).unwrap();
        assert_eq!(l.quadric, "2 points x R^3");
        assert_eq!(l.quotient, "R^2 U R^2");
        // Quotient dimension zero collapses to two points.
        let l = classify_quotient(&nilpotent(0, 1, 1), 1.0).unwrap();
        assert_eq!(l.quadric, "2 points x R^1");
        assert_eq!(l.quotient, "2 points");
    }

    #[test]
    fn nilpotent_hyperbolic_rows() {
        let l = classify_quotient(&nilpotent(2, 2, 1), 1.0).unwrap();
        assert_eq!(l.quadric, "(R^1 U R^1) x R^4");
        assert_eq!(l.quotient, "(R^1 U R^1) x R^1 x R^2");
        let l = classify_quotient(&nilpotent(1, 2, 1), 1.0).unwrap();
        assert_eq!(l.quadric, "(R^1 U R^1) x R^2");
        assert_eq!(l.quotient, "(R^1 U R^1) x R^1");
    }

    #[test]
    fn nilpotent_spherical_rows() {
        let l = classify_quotient(&nilpotent(1, 2, 2), 1.0).unwrap();
        assert_eq!(l.quadric, "S^1 x R^2");
        assert_eq!(l.quotient, "T S^1");
        let l = classify_quotient(&nilpotent(3, 3, 2), 1.0).unwrap();
        assert_eq!(l.quadric, "(S^1 x R^1) x R^5");
        assert_eq!(l.quotient, "T(S^1 x R^1) x R^2");
    }

    #[test]
    fn nilpotent_negative_level_flips_epsilon_signs() {
        let l = classify_quotient(&nilpotent(1, 2, 0), -1.0).unwrap();
        assert_eq!(l.quadric, "S^1 x R^2");
        assert_eq!(l.quotient, "T S^1");
        assert!(classify_quotient(&nilpotent(1, 2, 0), 1.0).is_err());
        assert!(classify_quotient(&nilpotent(1, 2, 2), -1.0).is_err());
    }

    #[test]
    fn complex_eigenvalue_family_is_the_cylinder() {
        let g = Generator::make_remark(1.0, 1.0).unwrap();
        let l = classify_quotient(&g, 1.0).unwrap();
        assert_eq!(l.quadric, "S^1 x R^2");
        assert_eq!(l.quotient, "cylinder S^1 x R");
        assert_eq!(l.group, ReductionGroup::R);
        assert!(classify_quotient(&g, -1.0).is_err());
    }

    #[test]
    fn explicit_and_off_catalog_levels_are_unsupported() {
        let j = Generator::make_case_minus_id(1, 2).unwrap();
        let g = Generator::from_explicit(j.matrix().clone()).unwrap();
        assert!(matches!(
            classify_quotient(&g, 1.0),
            Err(Error::UnsupportedClassification(_))
        ));
        assert!(classify_quotient(&j, 2.0).is_err());
        assert!(classify_quotient(&j, 0.0).is_err());
    }
}
