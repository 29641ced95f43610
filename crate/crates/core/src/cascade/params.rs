use crate::error::{Error, Result};
use crate::kv::KvDoc;
use crate::polarization::bell_diagonal_from_visibilities;

/// ħ in μeV·ns.
pub const HBAR_UEV_NS: f64 = 0.6582119569;

/// Exciton radiative lifetime of the reference dot, ns.
pub const X_LIFETIME_NS: f64 = 0.560;
/// Exciton spin-scattering time of the reference dot, ns.
pub const SPIN_SCATTERING_NS: f64 = 1.5;

/// Source and detection model of the XX→X cascade.
///
/// Rates are in ns⁻¹. Channel-indexed arrays are ordered
/// (XX detector, X co-port, X cross-port).
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeParams {
    /// Exciton radiative rate Γ₁.
    pub gamma1: f64,
    /// Biexciton radiative rate.
    pub gamma_xx: f64,
    /// Exciton spin-scattering rate Γs.
    pub gamma_s: f64,
    /// Fine structure splitting, μeV.
    pub fss_uev: f64,
    pub rep_rate_mhz: f64,
    /// Probability that a pulse starts a cascade.
    pub p_exc: f64,
    pub det_eff: [f64; 3],
    /// Gaussian timing jitter (σ) of every detector, ps.
    pub jitter_ps: f64,
    pub dark_cps: [f64; 3],
    /// Replace the physical two-photon state by the Bell-diagonal state with
    /// these (R/L, H/V, D/A) visibilities.
    pub visibility_override: Option<[f64; 3]>,
}

impl Default for CascadeParams {
    fn default() -> Self {
        let gamma1 = 1.0 / X_LIFETIME_NS;
        CascadeParams {
            gamma1,
            gamma_xx: 2.0 * gamma1,
            gamma_s: 1.0 / SPIN_SCATTERING_NS,
            fss_uev: 0.0,
            rep_rate_mhz: 200.0,
            p_exc: 0.1,
            det_eff: [0.5, 0.5, 0.5],
            jitter_ps: 300.0,
            dark_cps: [100.0, 100.0, 100.0],
            visibility_override: None,
        }
    }
}

impl CascadeParams {
    /// Noise-free detection: unit efficiency, no jitter, no dark counts.
    pub fn ideal_detection(mut self) -> Self {
        self.det_eff = [1.0; 3];
        self.jitter_ps = 0.0;
        self.dark_cps = [0.0; 3];
        self
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("gamma1", self.gamma1),
            ("gamma_xx", self.gamma_xx),
            ("gamma_s", self.gamma_s),
            ("jitter_ps", self.jitter_ps),
        ];
        for (name, x) in nonneg {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(Error::OutOfRange(format!("{name} = {x} must be finite and ≥ 0")));
            }
        }
        if !self.fss_uev.is_finite() {
            return Err(Error::OutOfRange("fss_ueV must be finite".into()));
        }
        if !(self.rep_rate_mhz > 0.0 && self.rep_rate_mhz.is_finite()) {
            return Err(Error::OutOfRange(format!(
                "rep_rate_mhz = {} must be > 0",
                self.rep_rate_mhz
            )));
        }
        if !(0.0..=1.0).contains(&self.p_exc) {
            return Err(Error::OutOfRange(format!("p_exc = {} not in [0, 1]", self.p_exc)));
        }
        for (i, &e) in self.det_eff.iter().enumerate() {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::OutOfRange(format!("det_eff[{i}] = {e} not in [0, 1]")));
            }
        }
        for (i, &d) in self.dark_cps.iter().enumerate() {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::OutOfRange(format!("dark_cps[{i}] = {d} must be ≥ 0")));
            }
        }
        if let Some([a, b, c]) = self.visibility_override {
            bell_diagonal_from_visibilities(a, b, c)?;
        }
        Ok(())
    }

    /// Pulse period in ps.
    pub fn period_ps(&self) -> f64 {
        1e6 / self.rep_rate_mhz
    }

    /// FSS precession frequency s/ħ in rad/ns.
    pub fn fss_omega(&self) -> f64 {
        self.fss_uev / HBAR_UEV_NS
    }

    /// Reads any of the known keys from a config document; missing keys keep
    /// their default. When `gamma1` is given without `gamma_xx` the biexciton
    /// rate follows as `2·gamma1`.
    pub fn from_kv(doc: &KvDoc) -> Result<Self> {
        let mut p = CascadeParams::default();
        if let Some(g) = doc.get_parsed("gamma1")? {
            p.gamma1 = g;
            p.gamma_xx = 2.0 * g;
        }
        if let Some(g) = doc.get_parsed("gamma_xx")? {
            p.gamma_xx = g;
        }
        if let Some(g) = doc.get_parsed("gamma_s")? {
            p.gamma_s = g;
        }
        if let Some(s) = doc.get_parsed("fss_ueV")? {
            p.fss_uev = s;
        }
        if let Some(r) = doc.get_parsed("rep_rate_mhz")? {
            p.rep_rate_mhz = r;
        }
        if let Some(x) = doc.get_parsed("p_exc")? {
            p.p_exc = x;
        }
        if let Some(v) = doc.get_list::<f64>("det_eff")? {
            p.det_eff = triple("det_eff", &v)?;
        }
        if let Some(j) = doc.get_parsed("jitter_ps")? {
            p.jitter_ps = j;
        }
        if let Some(v) = doc.get_list::<f64>("dark_cps")? {
            p.dark_cps = triple("dark_cps", &v)?;
        }
        match doc.get("visibility_override") {
            None | Some("") | Some("none") => {}
            Some(_) => {
                let v = doc.get_list::<f64>("visibility_override")?.unwrap_or_default();
                p.visibility_override = Some(triple("visibility_override", &v)?);
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn to_kv(&self, doc: &mut KvDoc) {
        let list = |v: &[f64; 3]| format!("{}, {}, {}", v[0], v[1], v[2]);
        doc.set("gamma1", self.gamma1);
        doc.set("gamma_xx", self.gamma_xx);
        doc.set("gamma_s", self.gamma_s);
        doc.set("fss_ueV", self.fss_uev);
        doc.set("rep_rate_mhz", self.rep_rate_mhz);
        doc.set("p_exc", self.p_exc);
        doc.set("det_eff", list(&self.det_eff));
        doc.set("jitter_ps", self.jitter_ps);
        doc.set("dark_cps", list(&self.dark_cps));
        doc.set(
            "visibility_override",
            self.visibility_override.as_ref().map(list).unwrap_or_else(|| "none".into()),
        );
    }
}

/// A single value is broadcast to all three channels.
fn triple(key: &str, v: &[f64]) -> Result<[f64; 3]> {
    match v {
        [x] => Ok([*x; 3]),
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err(Error::InvalidInput(format!(
            "{key} needs 1 or 3 values, got {}",
            v.len()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_reference_dot() {
        let p = CascadeParams::default();
        assert!((1.0 / p.gamma1 - 0.560).abs() < 1e-15);
        assert!((1.0 / p.gamma_s - 1.5).abs() < 1e-15);
        assert_eq!(p.period_ps(), 5000.0);
        p.validate().unwrap();
    }

    #[test]
    fn kv_round_trip() {
        let mut p = CascadeParams::default();
        p.fss_uev = 10.0;
        p.visibility_override = Some([0.87, 0.78, 0.77]);
        p.det_eff = [0.3, 0.4, 0.5];
        let mut doc = KvDoc::new();
        p.to_kv(&mut doc);
        let back = CascadeParams::from_kv(&KvDoc::parse(&doc.render()).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn gamma_xx_follows_gamma1() {
        let doc = KvDoc::parse("gamma1 = 2.0").unwrap();
        assert_eq!(CascadeParams::from_kv(&doc).unwrap().gamma_xx, 4.0);
        let doc = KvDoc::parse("gamma1 = 2.0\ngamma_xx = 3").unwrap();
        assert_eq!(CascadeParams::from_kv(&doc).unwrap().gamma_xx, 3.0);
    }

    #[test]
    fn invalid_values() {
        for text in [
            "p_exc = 1.5",
            "rep_rate_mhz = 0",
            "det_eff = 0.5, 2, 0.5",
            "gamma_s = -1",
            "dark_cps = 1, 2",
            "visibility_override = 1, 1, 0",
        ] {
            assert!(CascadeParams::from_kv(&KvDoc::parse(text).unwrap()).is_err(), "{text}");
        }
    }
}
