//! Explicit constants and the relations tying them together.
//!
//! The HSM constant K_N is not quoted anywhere; it is computed from the 1D
//! constant C_q ≤ (q+2)² through the Gagliardo–Nirenberg chain
//! (`kn_from_cq`). Everything downstream of it is tagged chain-derived.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::special::{compensated_sum, ln_gamma};

/// Upper bound (q+2)² for the 1D key-inequality constant C_q.
pub fn cq_upper_bound(q: f64) -> Result<f64> {
    if !(q >= 2.0) {
        return invalid(format!("C_q needs q >= 2, got {q}"));
    }
    Ok((q + 2.0) * (q + 2.0))
}

/// Np/(N−p).
pub fn sobolev_exponent(dim: usize, p: f64) -> Result<f64> {
    let n = dim as f64;
    if !(p >= 1.0) || p >= n {
        return invalid(format!("Sobolev exponent needs 1 <= p < N (N = {dim}, p = {p})"));
    }
    Ok(n * p / (n - p))
}

/// K_N = N · C_q^{−4(N−1)/(N−2)}.
pub fn kn_from_cq(dim: usize, cq: f64) -> Result<f64> {
    if dim < 3 || !(cq > 0.0) {
        return invalid(format!("K_N needs N >= 3 and C_q > 0 (N = {dim}, C_q = {cq})"));
    }
    let n = dim as f64;
    Ok(n * cq.powf(-4.0 * (n - 1.0) / (n - 2.0)))
}

/// L_N = e^{N/2−1} K_N^{−N/2}.
pub fn clr_constant(dim: usize, kn: f64) -> Result<f64> {
    if dim < 3 || !(kn > 0.0) {
        return invalid(format!("L_N needs N >= 3 and K_N > 0 (N = {dim}, K_N = {kn})"));
    }
    let half = dim as f64 / 2.0;
    Ok(((half - 1.0) - half * kn.ln()).exp())
}

/// (S^{−κ}, e^{κ−1} S^{−κ}): the two-sided bracket for the CLR constant
/// given a Sobolev constant S with exponent q = 2κ/(κ−1).
pub fn clr_from_sobolev(s: f64, kappa: f64) -> Result<(f64, f64)> {
    if !(kappa > 1.0) {
        return invalid(format!("CLR bracket needs kappa > 1, got {kappa}"));
    }
    if !(s > 0.0) {
        return invalid(format!("CLR bracket needs S > 0, got {s}"));
    }
    let lower = (-kappa * s.ln()).exp();
    let upper = ((kappa - 1.0) - kappa * s.ln()).exp();
    Ok((lower, upper))
}

/// θ = (N/2)(1 − 2/q).
pub fn theta_of(dim: usize, q: f64) -> Result<f64> {
    let n = dim as f64;
    if !(q >= 2.0) {
        return invalid(format!("theta needs q >= 2, got {q}"));
    }
    if dim >= 3 && q > 2.0 * n / (n - 2.0) + 1e-12 {
        return invalid(format!("theta needs q <= 2N/(N-2) for N = {dim}, got {q}"));
    }
    Ok(0.5 * n * (1.0 - 2.0 / q))
}

/// (γ, κ) = (q(1−θ)/(q−2), qθ/(q−2)).
pub fn gamma_kappa(q: f64, theta: f64) -> Result<(f64, f64)> {
    if !(q > 2.0) {
        return invalid(format!("gamma/kappa need q > 2, got {q}"));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return invalid(format!("gamma/kappa need 0 < theta < 1, got {theta}"));
    }
    Ok((q * (1.0 - theta) / (q - 2.0), q * theta / (q - 2.0)))
}

/// Upper bound for the Lieb–Thirring constant L_γ̃ obtained from an
/// interpolation inequality with constant S:
///
/// γ̃^{γ̃+1}/(γ^γ (γ̃−γ)^{γ̃−γ}) · Γ(γ+κ+1)Γ(γ̃−γ)/Γ(γ̃+κ+1)
///   · e^{γ+κ−1} (θ^{−θ}(1−θ)^{−(1−θ)} S)^{−γ−κ}.
///
/// Returns `+inf` in the limit γ̃ = γ (pole of Γ(γ̃−γ)).
pub fn lt_constant(gamma_tilde: f64, gamma: f64, kappa: f64, theta: f64, s: f64) -> Result<f64> {
    if !(gamma > 0.0 && kappa > 0.0 && s > 0.0) || !(theta > 0.0 && theta < 1.0) {
        return invalid("lt_constant needs gamma, kappa, S > 0 and 0 < theta < 1");
    }
    if gamma_tilde < gamma {
        return invalid(format!("lt_constant needs gamma_tilde > gamma ({gamma_tilde} <= {gamma})"));
    }
    if gamma_tilde == gamma {
        return Ok(f64::INFINITY);
    }
    let gap = gamma_tilde - gamma;
    let ln = compensated_sum([
        (gamma_tilde + 1.0) * gamma_tilde.ln(),
        -gamma * gamma.ln(),
        -gap * gap.ln(),
        ln_gamma(gamma + kappa + 1.0),
        ln_gamma(gap),
        -ln_gamma(gamma_tilde + kappa + 1.0),
        gamma + kappa - 1.0,
        -(gamma + kappa) * (-theta * theta.ln() - (1.0 - theta) * (1.0 - theta).ln() + s.ln()),
    ]);
    Ok(ln.exp())
}

/// Interpolation constant K_{N,θ} in dimensions 1 and 2 from the 1D chain.
///
/// N = 1: K_{1,θ} = C_q^{−θ} with θ = (q−2)/(2q).
/// N = 2 (q ≥ 4): K_{2,θ} = 2^θ C_{q−2}^{−(q−2)} with θ = 1 − 2/q.
pub fn interpolation_constant(dim: usize, q: f64) -> Result<f64> {
    let theta = theta_of(dim, q)?;
    match dim {
        1 => Ok((-theta * cq_upper_bound(q)?.ln()).exp()),
        2 => {
            if q < 4.0 {
                return invalid(format!("the 2D chain needs q >= 4, got {q}"));
            }
            Ok((theta * 2f64.ln() - (q - 2.0) * cq_upper_bound(q - 2.0)?.ln()).exp())
        }
        _ => invalid(format!("interpolation_constant is for N = 1, 2; got {dim}")),
    }
}

/// Chain-derived Hardy–Lieb–Thirring constant L_{N,γ̃} for N = 1, 2:
/// the smallest `lt_constant` bound over a sweep of admissible q.
pub fn hlt_chain_constant(dim: usize, gamma_tilde: f64) -> Result<(f64, f64)> {
    let (q_min, q_max) = match dim {
        1 => (6.0, 60.0),
        2 => (4.0, 60.0),
        _ => return invalid(format!("HLT chain is for N = 1, 2; got {dim}")),
    };
    let mut best: Option<(f64, f64)> = None;
    for i in 1..=2000 {
        let q = q_min + (q_max - q_min) * i as f64 / 2000.0;
        let theta = theta_of(dim, q)?;
        let (gamma, kappa) = gamma_kappa(q, theta)?;
        if gamma >= gamma_tilde {
            continue;
        }
        let s = interpolation_constant(dim, q)?;
        let l = lt_constant(gamma_tilde, gamma, kappa, theta, s)?;
        if l.is_finite() && best.is_none_or(|(b, _)| l < b) {
            best = Some((l, q));
        }
    }
    best.ok_or_else(|| {
        crate::error::Error::InvalidParameter(format!(
            "no admissible q for gamma_tilde = {gamma_tilde} in dimension {dim}"
        ))
    })
}

/// Where a chain value came from.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Provenance {
    pub field: &'static str,
    pub formula: &'static str,
}

/// (q, p, N, C_q, K_N, L_N, θ, γ, κ) for one parameter set.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantChain {
    pub dim: usize,
    pub p: f64,
    pub q: f64,
    pub cq: Option<f64>,
    pub kn: Option<f64>,
    pub ln: Option<f64>,
    pub theta: f64,
    pub gamma: f64,
    pub kappa: f64,
    /// Sobolev (or interpolation) constant fed to the CLR/LT relations.
    pub s: Option<f64>,
    pub lt: Option<f64>,
    pub gamma_tilde: Option<f64>,
    pub provenance: Vec<Provenance>,
}

impl ConstantChain {
    /// Chain for p = 2 and N ≥ 3 at the Sobolev exponent.
    pub fn sobolev(dim: usize) -> Result<Self> {
        let q = sobolev_exponent(dim, 2.0)?;
        let cq = cq_upper_bound(q)?;
        let kn = kn_from_cq(dim, cq)?;
        let ln = clr_constant(dim, kn)?;
        let theta = theta_of(dim, q)?;
        Ok(ConstantChain {
            dim,
            p: 2.0,
            q,
            cq: Some(cq),
            kn: Some(kn),
            ln: Some(ln),
            theta,
            gamma: 0.0,
            kappa: dim as f64 / 2.0,
            s: Some(kn),
            lt: None,
            gamma_tilde: None,
            provenance: vec![
                Provenance { field: "q", formula: "2N/(N-2)" },
                Provenance { field: "C_q", formula: "(q+2)^2 upper bound" },
                Provenance { field: "K_N", formula: "N * C_q^(-4(N-1)/(N-2)) (chain-derived)" },
                Provenance { field: "L_N", formula: "e^(N/2-1) * K_N^(-N/2) (chain-derived)" },
                Provenance { field: "kappa", formula: "N/2" },
            ],
        })
    }

    /// Chain for general 2 ≤ p < N, parametric in the 1D constant C_{p,q}.
    pub fn p_version(dim: usize, p: f64, cpq: Option<f64>) -> Result<Self> {
        if !(p >= 2.0) {
            return invalid(format!("the p-chain needs p >= 2, got {p}"));
        }
        let q = sobolev_exponent(dim, p)?;
        Ok(ConstantChain {
            dim,
            p,
            q,
            cq: cpq,
            kn: None,
            ln: None,
            theta: 1.0,
            gamma: 0.0,
            kappa: dim as f64 / p,
            s: None,
            lt: None,
            gamma_tilde: None,
            provenance: vec![
                Provenance { field: "q", formula: "Np/(N-p)" },
                Provenance { field: "C_pq", formula: "user supplied / empirical (no closed form)" },
            ],
        })
    }

    /// Interpolation chain for N = 1, 2 with Lieb–Thirring exponent γ̃.
    pub fn interpolation(dim: usize, q: f64, gamma_tilde: Option<f64>) -> Result<Self> {
        let theta = theta_of(dim, q)?;
        let (gamma, kappa) = gamma_kappa(q, theta)?;
        let s = interpolation_constant(dim, q)?;
        let cq = if dim == 1 { cq_upper_bound(q)? } else { cq_upper_bound(q - 2.0)? };
        let lt = match gamma_tilde {
            Some(gt) => Some(lt_constant(gt, gamma, kappa, theta, s)?),
            None => None,
        };
        Ok(ConstantChain {
            dim,
            p: 2.0,
            q,
            cq: Some(cq),
            kn: None,
            ln: None,
            theta,
            gamma,
            kappa,
            s: Some(s),
            lt,
            gamma_tilde,
            provenance: vec![
                Provenance { field: "theta", formula: "(N/2)(1-2/q)" },
                Provenance { field: "gamma,kappa", formula: "q(1-theta)/(q-2), q*theta/(q-2)" },
                Provenance {
                    field: "S",
                    formula: if dim == 1 { "C_q^(-theta) (chain-derived)" } else { "2^theta * C_(q-2)^(-(q-2)) (chain-derived)" },
                },
                Provenance { field: "L_gamma_tilde", formula: "Lieb-Thirring bound from S (chain-derived)" },
            ],
        })
    }
}
