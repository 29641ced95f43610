//! Serialized tomography result and bootstrap error bars.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::counts::TomoCounts;
use super::mle::{mle_fit, MleFit};
use crate::error::Result;
use crate::polarization::density::{DensityMatrix4, DensityMatrixDoc};
use crate::polarization::measures::StateSummary;

/// JSON document for a reconstructed state: the matrix, its imaginary part
/// split into magnitude and sign, the figures of merit, and optimizer
/// diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyReport {
    pub density_matrix: DensityMatrixDoc,
    pub abs_im: [[f64; 4]; 4],
    pub im_sign: [[i8; 4]; 4],
    pub summary: StateSummary,
    pub loss_initial: f64,
    pub loss_final: f64,
    pub evaluations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapSummary>,
}

impl TomographyReport {
    pub fn new(fit: &MleFit) -> Self {
        let doc = DensityMatrixDoc::from(&fit.rho);
        let mut abs_im = [[0.0; 4]; 4];
        let mut im_sign = [[0i8; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let v = doc.im[i][j];
                abs_im[i][j] = v.abs();
                im_sign[i][j] = if v > 0.0 {
                    1
                } else if v < 0.0 {
                    -1
                } else {
                    0
                };
            }
        }
        TomographyReport {
            density_matrix: doc,
            abs_im,
            im_sign,
            summary: StateSummary::of(&fit.rho),
            loss_initial: fit.loss_initial,
            loss_final: fit.loss_final,
            evaluations: fit.evaluations,
            bootstrap: None,
        }
    }

    pub fn rho(&self) -> Result<DensityMatrix4> {
        self.density_matrix.clone().try_into()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Standard deviations of the figures of merit over bootstrap replicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub replicates: usize,
    pub seed: u64,
    pub std: StateSummary,
}

fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Parametric bootstrap: every count is redrawn from a Poisson law with the
/// measured count as mean, and the state is reconstructed again. Replicates
/// run in parallel, each with its own random stream.
pub fn bootstrap(
    c: &TomoCounts,
    replicates: usize,
    seed: u64,
    tol: f64,
    max_iter: usize,
) -> Result<BootstrapSummary> {
    let summaries: Vec<StateSummary> = (0..replicates as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let fit = mle_fit(&c.resample(&mut rng), tol, max_iter)?;
            Ok(StateSummary::of(&fit.rho))
        })
        .collect::<Result<_>>()?;
    let col = |f: fn(&StateSummary) -> f64| std_dev(&summaries.iter().map(f).collect::<Vec<_>>());
    Ok(BootstrapSummary {
        replicates,
        seed,
        std: StateSummary {
            fidelity: col(|s| s.fidelity),
            chsh_s: col(|s| s.chsh_s),
            min_pt_eigenvalue: col(|s| s.min_pt_eigenvalue),
            concurrence: col(|s| s.concurrence),
            tangle: col(|s| s.tangle),
            linear_entropy: col(|s| s.linear_entropy),
            eof: col(|s| s.eof),
        },
    })
}
