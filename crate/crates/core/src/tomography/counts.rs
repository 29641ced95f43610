//! Coincidence counts of the 36 product projections and their CSV form
//! (`basis_xx,basis_x,counts`).

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::analysis::visibility::CorrelationSettingResult;
use crate::error::{Error, Result};
use crate::polarization::density::DensityMatrix4;
use crate::polarization::state::{Basis, MeasurementSetting, Pol};

/// Counts for every `(XX analyzer, X analyzer)` pair of the six states,
/// indexed by [`Pol::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct TomoCounts {
    counts: [[f64; 6]; 6],
}

fn check_count(xx: Pol, x: Pol, c: f64) -> Result<()> {
    if c.is_finite() && c >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("count for {xx}{x} must be ≥ 0, got {c}")))
    }
}

impl TomoCounts {
    /// Every entry must be finite and nonnegative. Counts are normally
    /// integers; fractional values are accepted for noiseless expectations.
    pub fn from_array(counts: [[f64; 6]; 6]) -> Result<Self> {
        for xx in Pol::ALL {
            for x in Pol::ALL {
                check_count(xx, x, counts[xx.index()][x.index()])?;
            }
        }
        Ok(TomoCounts { counts })
    }

    pub fn get(&self, xx: Pol, x: Pol) -> f64 {
        self.counts[xx.index()][x.index()]
    }

    pub fn as_array(&self) -> &[[f64; 6]; 6] {
        &self.counts
    }

    /// Counts of the four outcomes (+,+), (+,−), (−,+), (−,−) of a basis pair.
    pub fn quadruple(&self, bxx: Basis, bx: Basis) -> [f64; 4] {
        let (p, m) = bxx.states();
        let (q, n) = bx.states();
        [self.get(p, q), self.get(p, n), self.get(m, q), self.get(m, n)]
    }

    /// Total of one basis-pair quadruple, the flux estimate for its settings.
    pub fn flux(&self, bxx: Basis, bx: Basis) -> f64 {
        self.quadruple(bxx, bx).iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().flatten().sum()
    }

    /// Noiseless counts `flux · Tr[ρ P]`, with `flux` the total of each
    /// basis-pair quadruple.
    pub fn expected(rho: &DensityMatrix4, flux: f64) -> Self {
        let mut counts = [[0.0; 6]; 6];
        for xx in Pol::ALL {
            for x in Pol::ALL {
                let p = rho.coincidence_probability(&MeasurementSetting::from_pols(xx, x));
                counts[xx.index()][x.index()] = flux * p.max(0.0);
            }
        }
        TomoCounts { counts }
    }

    /// Independent Poisson counts with means `flux · Tr[ρ P]`.
    pub fn poisson<R: Rng + ?Sized>(rho: &DensityMatrix4, flux: f64, rng: &mut R) -> Self {
        Self::expected(rho, flux).resample(rng)
    }

    /// Redraws every count from a Poisson law with the current count as mean.
    pub fn resample<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let mut counts = self.counts;
        for c in counts.iter_mut().flatten() {
            *c = if *c > 0.0 {
                Poisson::new(*c).expect("positive mean").sample(rng).round()
            } else {
                0.0
            };
        }
        TomoCounts { counts }
    }

    /// Central-peak coincidences of lettered settings. The co port of setting
    /// `(xx, x)` counts outcome `(xx, x)` and the cross port counts
    /// `(xx, x⊥)`; outcomes seen by more than one setting are summed.
    pub fn from_setting_results(results: &[CorrelationSettingResult]) -> Result<Self> {
        let mut counts = [[0.0; 6]; 6];
        let mut seen = [[false; 6]; 6];
        for r in results {
            let Some((xx, x)) = r.label.as_pols() else {
                continue;
            };
            for (pol, n) in [(x, &r.n_parallel), (x.orthogonal(), &r.n_perp)] {
                counts[xx.index()][pol.index()] += n.central as f64;
                seen[xx.index()][pol.index()] = true;
            }
        }
        for xx in Pol::ALL {
            for x in Pol::ALL {
                if !seen[xx.index()][x.index()] {
                    return Err(Error::MissingSetting(format!("{xx}{x}")));
                }
            }
        }
        Ok(TomoCounts { counts })
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(r);
        let headers = rd.headers()?.clone();
        let want = ["basis_xx", "basis_x", "counts"];
        if headers.len() != 3 || headers.iter().zip(want).any(|(h, w)| h != w) {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header basis_xx,basis_x,counts, got {:?}", headers.iter().collect::<Vec<_>>()),
            });
        }
        let mut counts = [[f64::NAN; 6]; 6];
        for rec in rd.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            let bad = |msg: String| Error::Parse { line, msg };
            if rec.len() != 3 {
                return Err(bad(format!("expected 3 fields, got {}", rec.len())));
            }
            let xx: Pol = rec[0].parse().map_err(|e: Error| bad(e.to_string()))?;
            let x: Pol = rec[1].parse().map_err(|e: Error| bad(e.to_string()))?;
            let c: f64 = rec[2]
                .parse()
                .map_err(|_| bad(format!("bad count {:?}", &rec[2])))?;
            check_count(xx, x, c).map_err(|e| bad(e.to_string()))?;
            let slot = &mut counts[xx.index()][x.index()];
            if !slot.is_nan() {
                return Err(bad(format!("duplicate setting {xx}{x}")));
            }
            *slot = c;
        }
        for xx in Pol::ALL {
            for x in Pol::ALL {
                if counts[xx.index()][x.index()].is_nan() {
                    return Err(Error::MissingSetting(format!("{xx}{x}")));
                }
            }
        }
        Ok(TomoCounts { counts })
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["basis_xx", "basis_x", "counts"])?;
        for xx in Pol::ALL {
            for x in Pol::ALL {
                let c = self.get(xx, x);
                let s = if c.fract() == 0.0 && c < 9.0e15 {
                    format!("{}", c as u64)
                } else {
                    format!("{c}")
                };
                wr.write_record([xx.to_string(), x.to_string(), s])?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}
