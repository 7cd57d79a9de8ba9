//! Named operators, perturbations, composition families and bundles shared
//! by the command-line front end and the acceptance suite.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::SplitDifference;
use crate::linalg::{spectral_synthesis, ComplexMatrix};
use crate::random::random_unitary;
use crate::scalar::{Real, C};
use crate::symbol1d::{
    abs_xi_m, c_theta_times_xi, c_theta_times_xi_pow, cutoff_resolvent_symbol, op_from_symbol, pauli_monopole, shift,
    xi, CutoffFunction, DiscretizedOperator, SymbolFunction,
};
use crate::topology::BundlePreset;

macro_rules! named_enum {
    ($(#[$meta:meta])* $name:ident, $what:literal { $($variant:ident => $key:literal : $desc:literal,)+ }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $key)] $variant,)+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant,)+];

            pub fn name(self) -> &'static str {
                match self { $($name::$variant => $key,)+ }
            }

            pub fn description(self) -> &'static str {
                match self { $($name::$variant => $desc,)+ }
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                Self::ALL.iter().copied().find(|p| p.name() == s).ok_or_else(|| Error::InvalidExperiment {
                    reason: format!(concat!("unknown ", $what, " preset `{}`"), s),
                })
            }
        }
    };
}

named_enum!(
    /// Operators on the circle (or plain matrices).
    OperatorPreset, "operator" {
        Dtheta => "dtheta": "-i d/dtheta on S^1 (the one-dimensional counterexample), symbol xi",
        DthetaShifted => "dtheta_shifted": "-i d/dtheta + 0.3, a multiplier off the imaginary axis",
        VarCoeff => "var_coeff": "(2 + cos theta) xi, first order with variable coefficient",
        VarCoeffShifted => "var_coeff_shifted": "(2 + cos theta) xi + 0.3",
        VarCoeffM2 => "var_coeff_m2": "(2 + cos theta) xi^2 + 1, second order",
        Bessel => "bessel": "(1 + xi^2)^(1/2), first-order multiplier",
        Pauli => "pauli": "xi sigma_3 + cos theta sigma_1 + sin theta sigma_2 on C^2, Hermitian",
        Shift => "shift": "e^{i theta}, the unit mode shift (order 0)",
        DiagPm1 => "diag_pm1": "the 2x2 matrix diag(1, -1)",
        HermitianGap => "hermitian_gap": "seeded random Hermitian matrix with spectrum outside (-1/2, 1/2)",
    }
);

named_enum!(
    /// Perturbations in split form (principal symbol plus lower-order matrix).
    PerturbationPreset, "perturbation" {
        Zero => "zero": "the zero perturbation",
        CosLower => "cos_lower": "lower-order multiplication by cos theta",
        PrincipalXi => "principal_xi": "principal part xi (order 1)",
        OffDiagonal => "offdiag": "the 2x2 matrix [[0, 1], [1, 0]] (pairs with diag_pm1)",
    }
);

named_enum!(
    /// `lambda`-dependent symbol pairs `(f, g)` for the composition gap.
    CompositionPreset, "composition" {
        ResolventPair => "resolvent_pair": "f = a_m - lambda, g = psi (a_m - lambda)^-1 with a_m = (2 + cos theta) xi",
        Multipliers => "multipliers": "theta-independent f = xi - lambda, g = psi (xi - lambda)^-1; exact composition",
        OrderZero => "order_zero": "f = psi (a_m - lambda)^-1 e^{i theta} xi (order 0), g = psi (a_m - lambda)^-1",
    }
);

/// Mass of the [`OperatorPreset::Pauli`] preset.
const PAULI_MASS: f64 = 1.0;

impl OperatorPreset {
    /// Symbol, for presets defined by one.
    pub fn symbol<T: Real>(self) -> Option<SymbolFunction<T>> {
        Some(match self {
            OperatorPreset::Dtheta => xi::<T>().with_name("dtheta"),
            OperatorPreset::DthetaShifted => c_theta_times_xi(1.0, 0.0, 0.3).with_name("dtheta_shifted"),
            OperatorPreset::VarCoeff => c_theta_times_xi(2.0, 1.0, 0.0).with_name("var_coeff"),
            OperatorPreset::VarCoeffShifted => c_theta_times_xi(2.0, 1.0, 0.3).with_name("var_coeff_shifted"),
            OperatorPreset::VarCoeffM2 => c_theta_times_xi_pow(2.0, 1.0, 2, 1.0).with_name("var_coeff_m2"),
            OperatorPreset::Bessel => abs_xi_m(1.0).with_name("bessel"),
            OperatorPreset::Pauli => pauli_monopole(PAULI_MASS).with_name("pauli"),
            OperatorPreset::Shift => shift(),
            OperatorPreset::DiagPm1 | OperatorPreset::HermitianGap => return None,
        })
    }

    /// The operator on modes `|k| <= k_max`; `hermitian_gap` has dimension
    /// `2 k_max + 1` and uses `seed`.
    pub fn operator<T: Real>(self, k_max: usize, seed: u64) -> Result<DiscretizedOperator<T>> {
        let mut op = match self {
            OperatorPreset::DiagPm1 => {
                DiscretizedOperator::from_matrix(ComplexMatrix::from_real_diag(&[T::one(), -T::one()]), 0, 2, 1.0)?
            }
            OperatorPreset::HermitianGap => {
                let n = 2 * k_max + 1;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let u: ComplexMatrix<T> = random_unitary(n, &mut rng);
                let values: Vec<T> = (0..n)
                    .map(|_| {
                        let v: f64 = rng.gen_range(0.5..5.0);
                        T::lit(if rng.gen_bool(0.5) { v } else { -v })
                    })
                    .collect();
                DiscretizedOperator::from_matrix(spectral_synthesis(&u, &values), k_max, 1, 1.0)?
            }
            _ => op_from_symbol(&self.symbol::<T>().expect("symbol preset"), k_max)?,
        };
        op.symbol = Some(self.name().to_string());
        Ok(op)
    }
}

impl PerturbationPreset {
    /// The perturbation on the modes of `a`.
    pub fn split<T: Real>(self, a: &DiscretizedOperator<T>) -> Result<SplitDifference<T>> {
        let cos = |t: T, _: T| C::new(t.cos(), T::zero());
        match self {
            PerturbationPreset::Zero => Ok(SplitDifference::zero(a)),
            PerturbationPreset::CosLower => {
                if a.fiber_dim != 1 {
                    return Err(Error::InvalidExperiment { reason: "cos_lower needs a scalar operator".into() });
                }
                let c = SymbolFunction::scalar("cos", 0.0, cos, cos);
                let mut lower = op_from_symbol(&c, a.k_max)?;
                lower.symbol = Some("cos".into());
                SplitDifference::new(None, lower)
            }
            PerturbationPreset::PrincipalXi => {
                if a.fiber_dim != 1 {
                    return Err(Error::InvalidExperiment { reason: "principal_xi needs a scalar operator".into() });
                }
                SplitDifference::new(Some(xi()), a.with_matrix(ComplexMatrix::zeros(a.dim())))
            }
            PerturbationPreset::OffDiagonal => {
                if a.dim() != 2 {
                    return Err(Error::DimensionMismatch { expected: 2, found: a.dim() });
                }
                let (o, z) = (C::new(T::one(), T::zero()), C::new(T::zero(), T::zero()));
                let m = ComplexMatrix::from_fn(2, |i, j| if i == j { z } else { o });
                let mut lower = a.with_matrix(m);
                lower.order = 0.0;
                lower.symbol = Some("offdiag".into());
                SplitDifference::new(None, lower)
            }
        }
    }
}

/// Symbol pair `(f, g)` at `lambda`.
pub type SymbolPair<T> = (SymbolFunction<T>, SymbolFunction<T>);

impl CompositionPreset {
    pub fn pair<T: Real>(self, psi: &CutoffFunction, lambda: C<T>) -> Result<SymbolPair<T>> {
        let a_m = match self {
            CompositionPreset::Multipliers => xi::<T>(),
            _ => c_theta_times_xi::<T>(2.0, 1.0, 0.0),
        };
        let g = cutoff_resolvent_symbol(&a_m, psi, lambda)?;
        let f = match self {
            CompositionPreset::OrderZero => {
                let b = shift::<T>().product(&xi());
                g.product(&b).with_name("r_psi*e^{i theta}xi")
            }
            _ => {
                let minus = SymbolFunction::scalar("-lambda", 0.0, move |_, _| -lambda, move |_, _| -lambda);
                a_m.sum(&minus).with_name(format!("{}-lambda", a_m.name()))
            }
        };
        Ok((f, g))
    }

    /// No independent oracle backs the expected slope.
    pub fn fit_only(self) -> bool {
        self == CompositionPreset::OrderZero
    }
}

/// Every preset with a one-line description.
pub fn list_presets() -> String {
    let mut out = String::new();
    let mut section = |title: &str, rows: Vec<(&str, &str)>| {
        let _ = writeln!(out, "{title}:");
        for (name, desc) in rows {
            let _ = writeln!(out, "  {name}: {desc}");
        }
    };
    section("operators", OperatorPreset::ALL.iter().map(|p| (p.name(), p.description())).collect());
    section("perturbations", PerturbationPreset::ALL.iter().map(|p| (p.name(), p.description())).collect());
    section("composition families", CompositionPreset::ALL.iter().map(|p| (p.name(), p.description())).collect());
    let bundles: Vec<(&str, String)> = BundlePreset::ALL
        .iter()
        .map(|p| {
            let desc = if *p == BundlePreset::Monopole {
                format!("2P_xi - I obstruction family; {}", p.description())
            } else {
                p.description().to_string()
            };
            (p.name(), desc)
        })
        .collect();
    section("bundles", bundles.iter().map(|(n, d)| (*n, d.as_str())).collect());
    out
}

/// Number of named presets across all registries.
pub fn preset_count() -> usize {
    OperatorPreset::ALL.len() + PerturbationPreset::ALL.len() + CompositionPreset::ALL.len() + BundlePreset::ALL.len()
}
