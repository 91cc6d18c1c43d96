//! Initial conditions and reference solutions of the verification scenarios.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mesh::Domain;
use crate::pde::{Direction, PdeSystem, DEFAULT_GRAVITY};
use crate::solver::RiemannFlux;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioName {
    AcousticPlanar,
    ElasticPlanar,
    EulerBell,
    EulerVortex,
    SweLake,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 5] = [
        Self::AcousticPlanar,
        Self::ElasticPlanar,
        Self::EulerBell,
        Self::EulerVortex,
        Self::SweLake,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::AcousticPlanar => "acoustic-planar",
            Self::ElasticPlanar => "elastic-planar",
            Self::EulerBell => "euler-bell",
            Self::EulerVortex => "euler-vortex",
            Self::SweLake => "swe-lake",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Self::ALL
            .into_iter()
            .find(|n| n.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))
    }
}

/// One travelling mode `omega sin(omega t - k.x) q0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarMode {
    pub k: [f64; 2],
    pub omega: f64,
    pub q0: Vec<f64>,
}

impl PlanarMode {
    pub fn eval(&self, x: f64, y: f64, t: f64, out: &mut [f64]) {
        let s = self.omega * (self.omega * t - self.k[0] * x - self.k[1] * y).sin();
        for (o, q) in out.iter_mut().zip(&self.q0) {
            *o += s * q;
        }
    }
}

fn dense_flux_matrix(sys: &PdeSystem, dir: Direction) -> DMatrix<f64> {
    let nv = sys.nvars();
    let mut m = DMatrix::zeros(nv, nv);
    let mut e = vec![0.0; nv];
    let mut col = vec![0.0; nv];
    for j in 0..nv {
        e.iter_mut().for_each(|x| *x = 0.0);
        e[j] = 1.0;
        sys.flux(&e, dir, &mut col).expect("linear flux");
        for i in 0..nv {
            m[(i, j)] = col[i];
        }
    }
    m
}

/// Symbol `k_x A + k_y B` of a linear system.
pub fn wave_symbol(sys: &PdeSystem, k: [f64; 2]) -> DMatrix<f64> {
    dense_flux_matrix(sys, Direction::X) * k[0] + dense_flux_matrix(sys, Direction::Y) * k[1]
}

/// Eigenpair of the symbol with the largest frequency.
pub fn planar_wave(sys: &PdeSystem, k: [f64; 2]) -> Result<PlanarMode> {
    planar_wave_near(sys, k, f64::INFINITY)
}

/// Eigenpair whose positive frequency is closest to `target` (the largest
/// one for an infinite target). The eigenvector is scaled so that its first
/// nonzero component equals one.
pub fn planar_wave_near(sys: &PdeSystem, k: [f64; 2], target: f64) -> Result<PlanarMode> {
    if !sys.is_linear() {
        return Err(Error::Config("planar waves need a linear system".into()));
    }
    if k[0] == 0.0 && k[1] == 0.0 {
        return Err(Error::Config("wave vector must be nonzero".into()));
    }
    let m = wave_symbol(sys, k);
    let nv = m.nrows();
    let eig = m
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Internal("complex eigenvalues in planar wave symbol".into()))?;
    let omega = eig
        .iter()
        .copied()
        .filter(|&w| w > 1e-9)
        .min_by(|a, b| {
            let key = |w: f64| if target.is_finite() { (w - target).abs() } else { -w };
            key(*a).partial_cmp(&key(*b)).unwrap()
        })
        .ok_or_else(|| Error::Internal("no positive frequency".into()))?;
    let shifted = &m - DMatrix::identity(nv, nv) * omega;
    let svd = shifted.svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Internal("svd failed".into()))?;
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let mut q0: Vec<f64> = (0..nv).map(|j| vt[(imin, j)]).collect();
    let lead = *q0
        .iter()
        .find(|v| v.abs() > 1e-10)
        .ok_or_else(|| Error::Internal("zero eigenvector".into()))?;
    q0.iter_mut().for_each(|v| *v /= lead);
    let mode = PlanarMode { k, omega, q0 };
    let r = eigen_residual(sys, &mode);
    if r > 1e-12 {
        return Err(Error::Internal(format!("eigenpair residual {r:e} too large")));
    }
    Ok(mode)
}

/// `|| (k_x A + k_y B) q0 - omega q0 ||_inf`.
pub fn eigen_residual(sys: &PdeSystem, mode: &PlanarMode) -> f64 {
    let m = wave_symbol(sys, mode.k);
    let q = nalgebra::DVector::from_column_slice(&mode.q0);
    (m * &q - q * mode.omega).amax()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioKind {
    PlanarWaves(Vec<PlanarMode>),
    GaussianBell { rho0: f64 },
    IsentropicVortex { beta: f64 },
    LakeAtRest { eta0: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: ScenarioName,
    pub sys: PdeSystem,
    pub domain: Domain,
    pub t_end: f64,
    pub kind: ScenarioKind,
}

impl Scenario {
    /// Default parameter set of a scenario; the lake uses `eta0 = 2`.
    pub fn new(name: ScenarioName) -> Result<Self> {
        let unit = Domain::square(-1.0, 1.0);
        Ok(match name {
            ScenarioName::AcousticPlanar => {
                let sys = PdeSystem::Acoustic { bulk: 4.0, rho: 1.0 };
                let mode = planar_wave(&sys, [PI, PI])?;
                Self {
                    name,
                    sys,
                    domain: unit,
                    t_end: 2.0 * 2f64.sqrt(),
                    kind: ScenarioKind::PlanarWaves(vec![mode]),
                }
            }
            ScenarioName::ElasticPlanar => {
                let sys = PdeSystem::Elastic {
                    lambda: 2.0,
                    mu: 1.0,
                    rho: 1.0,
                };
                let p = planar_wave(&sys, [2.0 * PI, 0.0])?;
                let s = planar_wave_near(&sys, [0.0, 2.0 * PI], 2.0 * PI)?;
                Self {
                    name,
                    sys,
                    domain: unit,
                    t_end: 2.0,
                    kind: ScenarioKind::PlanarWaves(vec![p, s]),
                }
            }
            ScenarioName::EulerBell => Self {
                name,
                sys: PdeSystem::Euler { gamma: 1.4 },
                domain: unit,
                t_end: 2.0,
                kind: ScenarioKind::GaussianBell { rho0: 0.02 },
            },
            ScenarioName::EulerVortex => Self {
                name,
                sys: PdeSystem::Euler { gamma: 1.4 },
                domain: Domain::square(-5.0, 5.0),
                t_end: 10.0,
                kind: ScenarioKind::IsentropicVortex { beta: 5.0 },
            },
            ScenarioName::SweLake => Self::lake_at_rest(2.0)?,
        })
    }

    /// Lake at rest with surface `eta0`. `eta0 = 0` selects the variant with
    /// bathymetry `0.5 sin(2 pi (x + y)) - 1`; otherwise `eta0 > 1` is needed
    /// to keep the lake wet.
    pub fn lake_at_rest(eta0: f64) -> Result<Self> {
        if eta0 != 0.0 && eta0 <= 1.0 {
            return Err(Error::Config(format!(
                "lake surface eta0 = {eta0} leaves dry cells; use eta0 > 1 or eta0 = 0"
            )));
        }
        Ok(Self {
            name: ScenarioName::SweLake,
            sys: PdeSystem::ShallowWater { g: DEFAULT_GRAVITY },
            domain: Domain::square(-1.0, 1.0),
            t_end: 1.0,
            kind: ScenarioKind::LakeAtRest { eta0 },
        })
    }

    pub fn with_gravity(mut self, g: f64) -> Result<Self> {
        if !(g > 0.0) {
            return Err(Error::Config("gravity must be positive".into()));
        }
        if let PdeSystem::ShallowWater { g: ref mut old } = self.sys {
            *old = g;
        }
        Ok(self)
    }

    pub fn is_static(&self) -> bool {
        matches!(
            self.kind,
            ScenarioKind::IsentropicVortex { .. } | ScenarioKind::LakeAtRest { .. }
        )
    }

    pub fn riemann(&self) -> RiemannFlux {
        if self.sys.has_ncp() {
            RiemannFlux::WellBalancedSwe
        } else {
            RiemannFlux::Rusanov
        }
    }

    pub fn init(&self, x: f64, y: f64) -> Vec<f64> {
        self.exact(x, y, 0.0)
    }

    /// Analytic state at `(x, y, t)`; static scenarios ignore `t`.
    pub fn exact(&self, x: f64, y: f64, t: f64) -> Vec<f64> {
        match &self.kind {
            ScenarioKind::PlanarWaves(modes) => {
                let mut out = vec![0.0; self.sys.nvars()];
                for m in modes {
                    m.eval(x, y, t, &mut out);
                }
                out
            }
            ScenarioKind::GaussianBell { rho0 } => {
                let gamma = self.gamma();
                let dx = self.domain.wrap(x - t, 0);
                let dy = self.domain.wrap(y - t, 1);
                let rho = rho0 * (1.0 + (-50.0 * (dx * dx + dy * dy)).exp());
                let p = 1.0;
                let e = p / (gamma - 1.0) + 0.5 * rho * 2.0;
                vec![rho, rho, rho, e]
            }
            ScenarioKind::IsentropicVortex { beta } => isentropic_vortex(self.gamma(), *beta, x, y),
            ScenarioKind::LakeAtRest { eta0 } => {
                let s = (2.0 * PI * (x + y)).sin();
                if *eta0 == 0.0 {
                    let b = 0.5 * s - 1.0;
                    vec![-b, 0.0, 0.0, b]
                } else {
                    vec![eta0 - s, 0.0, 0.0, s]
                }
            }
        }
    }

    fn gamma(&self) -> f64 {
        match self.sys {
            PdeSystem::Euler { gamma } => gamma,
            _ => unreachable!("gamma of a non-Euler scenario"),
        }
    }
}

/// Hu-Shu vortex at rest with `rho_inf = p_inf = 1`.
pub fn isentropic_vortex(gamma: f64, beta: f64, x: f64, y: f64) -> Vec<f64> {
    let r2 = x * x + y * y;
    let dt = (1.0 - gamma) * beta * beta / (8.0 * gamma * PI * PI) * (1.0 - r2).exp();
    let rho = (1.0 + dt).powf(1.0 / (gamma - 1.0));
    let p = (1.0 + dt).powf(gamma / (gamma - 1.0));
    let a = beta / (2.0 * PI) * (0.5 * (1.0 - r2)).exp();
    let u = -y * a;
    let v = x * a;
    vec![
        rho,
        rho * u,
        rho * v,
        p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::euler_pressure;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn names_round_trip() {
        for n in ScenarioName::ALL {
            assert_eq!(n.name().parse::<ScenarioName>().unwrap(), n);
        }
        assert!("swe".parse::<ScenarioName>().is_err());
    }

    #[test]
    fn acoustic_eigenpair() {
        let s = Scenario::new(ScenarioName::AcousticPlanar).unwrap();
        let ScenarioKind::PlanarWaves(modes) = &s.kind else {
            panic!()
        };
        let m = &modes[0];
        assert_abs_diff_eq!(m.omega, 2.0 * PI * 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(m.q0[0], 1.0);
        assert_abs_diff_eq!(m.q0[1], 0.35355339059327, epsilon = 1e-12);
        assert!(eigen_residual(&s.sys, m) <= 1e-12);
    }

    #[test]
    fn elastic_modes() {
        let s = Scenario::new(ScenarioName::ElasticPlanar).unwrap();
        let ScenarioKind::PlanarWaves(modes) = &s.kind else {
            panic!()
        };
        assert_abs_diff_eq!(modes[0].omega, 4.0 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(modes[1].omega, 2.0 * PI, epsilon = 1e-12);
        let expect_p = [1.0, 0.5, 0.0, -0.5, 0.0];
        let expect_s = [0.0, 0.0, 1.0, -1.0, 0.0];
        for i in 0..5 {
            assert_abs_diff_eq!(modes[0].q0[i], expect_p[i], epsilon = 1e-12);
            assert_abs_diff_eq!(modes[1].q0[i], expect_s[i], epsilon = 1e-12);
        }
        for m in modes {
            assert!(eigen_residual(&s.sys, m) <= 1e-12);
        }
    }

    #[test]
    fn planar_wave_preconditions() {
        let sys = PdeSystem::Acoustic { bulk: 4.0, rho: 1.0 };
        assert!(planar_wave(&sys, [0.0, 0.0]).is_err());
        assert!(planar_wave(&PdeSystem::Euler { gamma: 1.4 }, [1.0, 0.0]).is_err());
    }

    #[test]
    fn planar_waves_are_time_periodic() {
        for (name, period) in [
            (ScenarioName::AcousticPlanar, 2f64.sqrt()),
            (ScenarioName::ElasticPlanar, 1.0),
        ] {
            let s = Scenario::new(name).unwrap();
            for &(x, y) in &[(0.1, -0.3), (0.77, 0.5), (-1.0, 1.0)] {
                let a = s.exact(x, y, 0.0);
                let b = s.exact(x, y, period);
                for (u, v) in a.iter().zip(&b) {
                    assert_abs_diff_eq!(u, v, epsilon = 1e-12);
                }
                assert_eq!(s.init(x, y), a);
            }
        }
    }

    #[test]
    fn bell_examples() {
        let s = Scenario::new(ScenarioName::EulerBell).unwrap();
        let q = s.init(0.0, 0.0);
        assert_abs_diff_eq!(q[0], 0.04, epsilon = 1e-15);
        assert_abs_diff_eq!(euler_pressure(1.4, &q), 1.0, epsilon = 1e-13);
        let q2 = s.exact(0.0, 0.0, 2.0);
        for (a, b) in q.iter().zip(&q2) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(s.init(1.0, -1.0)[0], 0.02, epsilon = 1e-15);
    }

    #[test]
    fn vortex_examples() {
        let s = Scenario::new(ScenarioName::EulerVortex).unwrap();
        let q = s.init(0.0, 0.0);
        assert_eq!(q[1], 0.0);
        assert_eq!(q[2], 0.0);
        let far = s.init(40.0, 0.0);
        assert_abs_diff_eq!(far[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(far[3], 2.5, epsilon = 1e-12);
        assert!(s.is_static());
        assert_eq!(s.exact(0.3, 0.2, 7.0), s.init(0.3, 0.2));
    }

    #[test]
    fn vortex_is_in_radial_equilibrium() {
        // dp/dr = rho u_theta^2 / r, checked by central differences
        let gamma = 1.4;
        for &r in &[0.5, 1.0, 1.7, 2.5] {
            let fd = 1e-5;
            let p = |r: f64| euler_pressure(gamma, &isentropic_vortex(gamma, 5.0, r, 0.0));
            let dpdr = (p(r + fd) - p(r - fd)) / (2.0 * fd);
            let q = isentropic_vortex(gamma, 5.0, r, 0.0);
            let ut = q[2] / q[0];
            assert_abs_diff_eq!(dpdr, q[0] * ut * ut / r, epsilon = 1e-8);
        }
    }

    #[test]
    fn lake_examples() {
        let s = Scenario::new(ScenarioName::SweLake).unwrap();
        assert_eq!(s.init(0.0, 0.0), vec![2.0, 0.0, 0.0, 0.0]);
        let q = s.init(0.25, 0.0);
        assert_abs_diff_eq!(q[3], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q[0], 1.0, epsilon = 1e-15);
        assert!(Scenario::lake_at_rest(1.0).is_err());
        assert!(Scenario::lake_at_rest(0.5).is_err());
        let z = Scenario::lake_at_rest(0.0).unwrap();
        for &(x, y) in &[(0.125, 0.0), (-0.125, 0.0), (0.3, 0.9)] {
            let q = z.init(x, y);
            assert!(q[0] >= 0.5);
            assert_eq!(q[0] + q[3], 0.0);
        }
        assert!(s.clone().with_gravity(-1.0).is_err());
        let g = s.with_gravity(1.0).unwrap();
        assert_eq!(g.sys, PdeSystem::ShallowWater { g: 1.0 });
    }

    proptest! {
        #[test]
        fn vortex_entropy_is_one(x in -5.0f64..5.0, y in -5.0f64..5.0) {
            let q = isentropic_vortex(1.4, 5.0, x, y);
            let s = euler_pressure(1.4, &q) / q[0].powf(1.4);
            prop_assert!((s - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn lake_surface_is_flat(x in -1.0f64..1.0, y in -1.0f64..1.0) {
            let s = Scenario::lake_at_rest(2.0).unwrap();
            let q = s.init(x, y);
            prop_assert!((q[0] + q[3] - 2.0).abs() <= 4.0 * f64::EPSILON);
            prop_assert!(q[0] > 0.0);
        }
    }
}
