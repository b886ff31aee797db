use super::{ChainSpec, Sector};
use crate::entanglement::{concurrence, TwoSiteDensity};
use crate::error::{Error, Result};
use crate::numerics::{
    pfaffian, AntisymmetricMatrix, CMatrix, CompensatedSum, ComplexCompensatedSum, C64,
};

pub const DEFAULT_MAX_SEPARATION: usize = 5;

/// `A_j = c_j† + c_j` and `B_j = c_j† - c_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Majorana {
    A(i64),
    B(i64),
}

impl Majorana {
    fn parts(self) -> (f64, i64) {
        match self {
            Majorana::A(j) => (1.0, j),
            Majorana::B(j) => (-1.0, j),
        }
    }
}

/// Per-mode occupations `n_k = ⟨c_k†c_k⟩` and pairings `f_k = ⟨c_k c_{-k}⟩`
/// at one instant, from which every real-space contraction follows.
#[derive(Clone, Debug)]
pub struct ContractionSet {
    n: usize,
    phi: Vec<f64>,
    occupation: Vec<f64>,
    pairing: Vec<C64>,
    max_separation: usize,
}

impl ContractionSet {
    /// Read contractions off block density matrices `states[p-1]`.
    pub fn from_states(spec: &ChainSpec, phi: &[f64], states: &[CMatrix]) -> Result<Self> {
        if spec.sector() != Sector::Antiperiodic {
            return Err(Error::invalid(
                "real-space contractions need the antiperiodic momentum set",
            ));
        }
        if states.len() != phi.len() {
            return Err(Error::DimensionMismatch {
                expected: phi.len(),
                found: states.len(),
            });
        }
        let mut occupation = Vec::with_capacity(states.len());
        let mut pairing = Vec::with_capacity(states.len());
        for rho in states {
            // c_k c_{-k} maps the pair state onto -|0⟩; singly occupied
            // states contribute half an occupation to each of ±k
            occupation.push(rho[(1, 1)].re + 0.5 * (rho[(2, 2)].re + rho[(3, 3)].re));
            pairing.push(-rho[(1, 0)]);
        }
        Ok(Self {
            n: spec.n(),
            phi: phi.to_vec(),
            occupation,
            pairing,
            max_separation: DEFAULT_MAX_SEPARATION,
        })
    }

    pub fn with_max_separation(mut self, r: usize) -> Self {
        self.max_separation = r;
        self
    }

    pub fn chain_length(&self) -> usize {
        self.n
    }

    /// `⟨c_i† c_{i+d}⟩`
    pub fn hopping(&self, d: i64) -> f64 {
        let mut s = CompensatedSum::new();
        for (k, nk) in self.phi.iter().zip(&self.occupation) {
            s.add((k * d as f64).cos() * nk);
        }
        2.0 * s.value() / self.n as f64
    }

    /// `⟨c_i c_{i+d}⟩`
    pub fn anomalous(&self, d: i64) -> C64 {
        let mut s = ComplexCompensatedSum::new();
        for (k, fk) in self.phi.iter().zip(&self.pairing) {
            s.add(fk * (k * d as f64).sin());
        }
        s.value() * C64::new(0.0, 2.0) / self.n as f64
    }

    /// `⟨x y⟩` for two Majorana operators.
    pub fn majorana(&self, x: Majorana, y: Majorana) -> C64 {
        let (sa, i) = x.parts();
        let (sb, j) = y.parts();
        let kron = if i == j { 1.0 } else { 0.0 };
        let cdcd = self.anomalous(i - j).conj();
        let cdc = C64::new(self.hopping(j - i), 0.0);
        let ccd = C64::new(kron - self.hopping(i - j), 0.0);
        let cc = self.anomalous(j - i);
        cdcd + cdc * sb + ccd * sa + cc * (sa * sb)
    }

    /// `⟨x_1 x_2 … x_{2n}⟩` for distinct Majoranas, via Wick's theorem.
    pub fn string(&self, ops: &[Majorana]) -> Result<C64> {
        let m = AntisymmetricMatrix::from_fn(ops.len(), |u, v| self.majorana(ops[u], ops[v]))?;
        Ok(pfaffian(&m))
    }

    /// `⟨σᶻ⟩`
    pub fn sigma_z(&self) -> f64 {
        2.0 * self.hopping(0) - 1.0
    }

    /// `M = ⟨Sᶻ⟩` per site with `S = σ/2`.
    pub fn magnetization(&self) -> f64 {
        0.5 * self.sigma_z()
    }

    /// Two-point spin correlators between sites `l` and `m`.
    pub fn correlators(&self, l: usize, m: usize) -> Result<Correlators> {
        if l == m {
            return Err(Error::invalid("correlators need two distinct sites"));
        }
        let (lo, hi) = (l.min(m) as i64, l.max(m) as i64);
        let r = (hi - lo) as usize;
        if r > self.max_separation {
            return Err(Error::invalid(format!(
                "separation {r} exceeds the limit {}",
                self.max_separation
            )));
        }
        use Majorana::{A, B};
        let mid: Vec<Majorana> = (lo + 1..hi).flat_map(|q| [A(q), B(q)]).collect();
        let chain = |first: Majorana, last: Majorana| -> Result<C64> {
            let mut ops = Vec::with_capacity(mid.len() + 2);
            ops.push(first);
            ops.extend_from_slice(&mid);
            ops.push(last);
            self.string(&ops)
        };
        let i = C64::new(0.0, 1.0);
        let z = -self.majorana(A(lo), B(lo)).re;
        let zz = self.string(&[A(lo), B(lo), A(hi), B(hi)])?.re;
        let xx = chain(B(lo), A(hi))?.re;
        let yy = -chain(A(lo), B(hi))?.re;
        let xy = (-i * chain(B(lo), B(hi))?).re;
        let yx = (-i * chain(A(lo), A(hi))?).re;
        let ordered = Correlators {
            separation: r,
            z_first: z,
            z_second: z,
            xx,
            yy,
            zz,
            xy,
            yx,
        };
        Ok(if l < m { ordered } else { ordered.swapped() })
    }

    pub fn two_site_density(&self, l: usize, m: usize) -> Result<TwoSiteDensity> {
        two_site_rdm(&self.correlators(l, m)?)
    }

    pub fn concurrence(&self, l: usize, m: usize) -> Result<f64> {
        Ok(concurrence(&self.two_site_density(l, m)?))
    }
}

/// Pauli expectations of a site pair, in `σ` normalization. `xy` is
/// `⟨σˣ_first σʸ_second⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correlators {
    pub separation: usize,
    pub z_first: f64,
    pub z_second: f64,
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xy: f64,
    pub yx: f64,
}

impl Correlators {
    pub fn swapped(self) -> Self {
        Self {
            z_first: self.z_second,
            z_second: self.z_first,
            xy: self.yx,
            yx: self.xy,
            ..self
        }
    }

    /// `(Sˣ, Sʸ, Sᶻ)` with `S = σ/2`.
    pub fn spin(&self) -> (f64, f64, f64) {
        (self.xx / 4.0, self.yy / 4.0, self.zz / 4.0)
    }
}

/// Two-site density matrix `¼ Σ ⟨σ^a σ^b⟩ σ^a ⊗ σ^b` from the parity-even
/// expectations; one-point `σˣ`, `σʸ` terms vanish.
pub fn two_site_rdm(c: &Correlators) -> Result<TwoSiteDensity> {
    let q = |x: f64| C64::new(x / 4.0, 0.0);
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = q(1.0 + c.z_first + c.z_second + c.zz);
    m[(1, 1)] = q(1.0 + c.z_first - c.z_second - c.zz);
    m[(2, 2)] = q(1.0 - c.z_first + c.z_second - c.zz);
    m[(3, 3)] = q(1.0 - c.z_first - c.z_second + c.zz);
    m[(0, 3)] = C64::new(c.xx - c.yy, -(c.xy + c.yx)) / 4.0;
    m[(3, 0)] = m[(0, 3)].conj();
    m[(1, 2)] = C64::new(c.xx + c.yy, c.xy - c.yx) / 4.0;
    m[(2, 1)] = m[(1, 2)].conj();
    TwoSiteDensity::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain1d::{ChainDynamics, Propagation};
    use crate::drive::Waveform;

    fn ground(n: usize, gamma: f64, j: f64, h: f64) -> ContractionSet {
        let spec = ChainSpec::new(
            n,
            gamma,
            Waveform::constant(j),
            Waveform::constant(h),
            f64::INFINITY,
        )
        .unwrap();
        ChainDynamics::new(spec, Propagation::Step)
            .unwrap()
            .contractions(0.0)
            .unwrap()
    }

    #[test]
    fn paramagnet_limit() {
        let cs = ground(40, 1.0, 0.0, 1.0);
        let c = cs.correlators(3, 4).unwrap();
        assert!(c.xx.abs() < 1e-14 && c.yy.abs() < 1e-14);
        assert!((c.spin().2 - 0.25).abs() < 1e-14);
        assert!((cs.magnetization() - 0.5).abs() < 1e-14);
        let rho = two_site_rdm(&c).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ising_limit_aligns_in_x() {
        let cs = ground(200, 1.0, 1.0, 1e-4);
        let (sx, _, _) = cs.correlators(0, 1).unwrap().spin();
        assert!((sx - 0.25).abs() < 1e-6);
    }

    #[test]
    fn zero_field_ising_is_unmagnetized() {
        let cs = ground(40, 1.0, 1.0, 0.0);
        assert!(cs.magnetization().abs() < 1e-13);
    }

    #[test]
    fn infinite_temperature_rdm() {
        let c = Correlators {
            separation: 1,
            z_first: 0.0,
            z_second: 0.0,
            xx: 0.0,
            yy: 0.0,
            zz: 0.0,
            xy: 0.0,
            yx: 0.0,
        };
        let rho = two_site_rdm(&c).unwrap();
        assert!((rho.matrix() - CMatrix::identity(4, 4) * C64::new(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn separation_limit() {
        let cs = ground(20, 1.0, 1.0, 1.0);
        assert!(cs.correlators(0, 6).is_err());
        assert!(cs.clone().with_max_separation(6).correlators(0, 6).is_ok());
        assert!(cs.correlators(2, 2).is_err());
    }

    #[test]
    fn sigma_z_from_majoranas_agrees_with_mode_sum() {
        let cs = ground(30, 0.4, 1.0, 0.8);
        let via_string = -cs.majorana(Majorana::A(0), Majorana::B(0)).re;
        assert!((via_string - cs.sigma_z()).abs() < 1e-14);
    }
}
