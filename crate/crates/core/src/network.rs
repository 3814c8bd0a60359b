//! Single-photon simulation of linear optical networks over
//! (polarization, spatial mode) labels.
//!
//! A state is a superposition of `|H, N⟩` and `|V, N⟩`. Elements act as
//! isometries on the labels they touch; propagation and mirrors carry no phase,
//! so every interferometer is balanced. At the end a single detector collects
//! all output modes without resolving them, and the output density matrix is
//! the incoherent sum of the per-mode polarization states.
//!
//! The four MEMS networks realize the closed-form Kraus maps of
//! [`crate::mems`]: each output mode carries one `√λ K |ψ0⟩`.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::linalg::{max_abs_diff, Mat2};
use crate::mems::{mems_kraus, network_angles, MemsParams, Region};
use crate::mueller::{hwp, rotator, JonesMatrix};
use crate::qmaps::Qubit;
use crate::stokes::JonesVector;
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Pol {
    H,
    V,
}

/// Amplitudes over `(mode, polarization)` on a declared set of spatial modes.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeState {
    declared: BTreeSet<u8>,
    amps: BTreeMap<(u8, Pol), C64>,
}

impl ModeState {
    pub fn new(modes: impl IntoIterator<Item = u8>) -> Self {
        Self { declared: modes.into_iter().collect(), amps: BTreeMap::new() }
    }

    /// `e0 |H, mode⟩ + e1 |V, mode⟩`.
    pub fn with_input(modes: impl IntoIterator<Item = u8>, mode: u8, psi: &JonesVector) -> Result<Self> {
        let mut s = Self::new(modes);
        s.check(mode)?;
        s.set(mode, Pol::H, psi.e0);
        s.set(mode, Pol::V, psi.e1);
        Ok(s)
    }

    pub fn declared(&self) -> impl Iterator<Item = u8> + '_ {
        self.declared.iter().copied()
    }

    fn check(&self, mode: u8) -> Result<()> {
        if self.declared.contains(&mode) {
            Ok(())
        } else {
            Err(Error::UndeclaredMode(mode))
        }
    }

    pub fn amplitude(&self, mode: u8, pol: Pol) -> C64 {
        self.amps.get(&(mode, pol)).copied().unwrap_or_default()
    }

    fn set(&mut self, mode: u8, pol: Pol, z: C64) {
        if z == C64::default() {
            self.amps.remove(&(mode, pol));
        } else {
            self.amps.insert((mode, pol), z);
        }
    }

    /// Polarization state carried by one spatial mode.
    pub fn polarization(&self, mode: u8) -> JonesVector {
        JonesVector::new(self.amplitude(mode, Pol::H), self.amplitude(mode, Pol::V))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|z| z.norm_sqr()).sum()
    }
}

/// Network elements. Mode-pair elements act on `(n, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Element {
    /// Keeps `H` in its mode and sends `V` across: `|V,n⟩ ↔ |V,m⟩`.
    Pbs { n: u8, m: u8 },
    Hwp { theta: f64, mode: u8 },
    Rotator { theta: f64, mode: u8 },
    /// `|H,n⟩ → cosθ|H,n⟩ + sinθ|H,m⟩`, `|H,m⟩ → −sinθ|H,n⟩ + cosθ|H,m⟩`.
    Hvbs { theta: f64, n: u8, m: u8 },
    /// `|V,m⟩ → cosθ|V,n⟩ + sinθ|V,m⟩`, `|V,n⟩ → sinθ|V,n⟩ − cosθ|V,m⟩`.
    Vvbs { theta: f64, n: u8, m: u8 },
    /// Exchanges the two spatial modes.
    Mirror { n: u8, m: u8 },
    /// Phase `e^{iφ}` on both polarizations of one mode. Not used by the MEMS builders.
    Phase { phi: f64, mode: u8 },
}

fn apply_jones(s: &mut ModeState, mode: u8, t: &Mat2) {
    let (h, v) = (s.amplitude(mode, Pol::H), s.amplitude(mode, Pol::V));
    s.set(mode, Pol::H, t[(0, 0)] * h + t[(0, 1)] * v);
    s.set(mode, Pol::V, t[(1, 0)] * h + t[(1, 1)] * v);
}

/// Applies a real 2×2 rotation-like map to the pair `(|pol,n⟩, |pol,m⟩)`,
/// with `cols[j]` the image of input `j` (0 = n, 1 = m) as `(n, m)` amplitudes.
fn mix_modes(s: &mut ModeState, pol: Pol, n: u8, m: u8, cols: [[f64; 2]; 2]) {
    let (xn, xm) = (s.amplitude(n, pol), s.amplitude(m, pol));
    s.set(n, pol, xn * cols[0][0] + xm * cols[1][0]);
    s.set(m, pol, xn * cols[0][1] + xm * cols[1][1]);
}

pub fn apply_element(e: &Element, s: &ModeState) -> Result<ModeState> {
    let mut out = s.clone();
    match *e {
        Element::Pbs { n, m } => {
            pair(s, n, m)?;
            let (vn, vm) = (s.amplitude(n, Pol::V), s.amplitude(m, Pol::V));
            out.set(n, Pol::V, vm);
            out.set(m, Pol::V, vn);
        }
        Element::Hwp { theta, mode } => {
            s.check(mode)?;
            apply_jones(&mut out, mode, &hwp(theta).t);
        }
        Element::Rotator { theta, mode } => {
            s.check(mode)?;
            apply_jones(&mut out, mode, &rotator(theta).t);
        }
        Element::Hvbs { theta, n, m } => {
            pair(s, n, m)?;
            let (sn, c) = theta.sin_cos();
            mix_modes(&mut out, Pol::H, n, m, [[c, sn], [-sn, c]]);
        }
        Element::Vvbs { theta, n, m } => {
            pair(s, n, m)?;
            let (sn, c) = theta.sin_cos();
            mix_modes(&mut out, Pol::V, n, m, [[sn, -c], [c, sn]]);
        }
        Element::Mirror { n, m } => {
            pair(s, n, m)?;
            for pol in [Pol::H, Pol::V] {
                let (xn, xm) = (s.amplitude(n, pol), s.amplitude(m, pol));
                out.set(n, pol, xm);
                out.set(m, pol, xn);
            }
        }
        Element::Phase { phi, mode } => {
            s.check(mode)?;
            apply_jones(&mut out, mode, &(Mat2::identity() * C64::from_polar(1.0, phi)));
        }
    }
    Ok(out)
}

fn pair(s: &ModeState, n: u8, m: u8) -> Result<()> {
    s.check(n)?;
    s.check(m)?;
    if n == m {
        return Err(Error::InvalidNetwork(format!("element couples mode {n} to itself")));
    }
    Ok(())
}

/// Composite horizontal variable beam splitter: rotator, PBS, rotator.
/// Agrees with [`Element::Hvbs`] on `|H, n⟩`.
pub fn composite_hvbs(theta: f64, n: u8, m: u8) -> Vec<Element> {
    vec![
        Element::Rotator { theta, mode: n },
        Element::Pbs { n, m },
        Element::Rotator { theta: -FRAC_PI_2, mode: m },
    ]
}

/// Composite vertical variable beam splitter. Agrees with [`Element::Vvbs`] on `|V, m⟩`.
pub fn composite_vvbs(theta: f64, n: u8, m: u8) -> Vec<Element> {
    vec![
        Element::Rotator { theta: -theta, mode: m },
        Element::Pbs { n, m },
        Element::Rotator { theta: FRAC_PI_2, mode: m },
    ]
}

/// An ordered element list with its declared modes, input mode and detector bin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetworkSpec {
    pub modes: Vec<u8>,
    pub input_mode: u8,
    pub elements: Vec<Element>,
    /// Output modes collected by the single, mode-blind detector.
    pub detector: Vec<u8>,
    /// Name of the Kraus branch leaving through each detector mode.
    pub labels: BTreeMap<u8, String>,
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<()> {
        let declared: BTreeSet<u8> = self.modes.iter().copied().collect();
        let check = |m: u8| if declared.contains(&m) { Ok(()) } else { Err(Error::UndeclaredMode(m)) };
        check(self.input_mode)?;
        for &d in &self.detector {
            check(d)?;
        }
        let probe = ModeState::new(self.modes.iter().copied());
        for e in &self.elements {
            apply_element(e, &probe)?;
        }
        Ok(())
    }
}

/// Polarization state leaving through one detector mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub mode: u8,
    pub label: String,
    pub state: JonesVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkOutput {
    pub branches: Vec<Branch>,
    pub final_state: ModeState,
    /// `Σ |φ⟩⟨φ|` over branches; its trace is the input norm for lossless networks.
    pub rho: Mat2,
}

impl NetworkOutput {
    pub fn trace(&self) -> f64 {
        (self.rho[(0, 0)] + self.rho[(1, 1)]).re
    }
}

/// Propagates `ψ0` and bins the output modes incoherently.
pub fn run_network(n: &NetworkSpec, psi0: &JonesVector) -> Result<NetworkOutput> {
    if !psi0.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut s = ModeState::with_input(n.modes.iter().copied(), n.input_mode, psi0)?;
    for e in &n.elements {
        s = apply_element(e, &s)?;
    }
    let mut rho = Mat2::zeros();
    let mut branches = Vec::with_capacity(n.detector.len());
    for &mode in &n.detector {
        let state = s.polarization(mode);
        let v = state.as_vector();
        rho += v * v.adjoint();
        let label = n.labels.get(&mode).cloned().unwrap_or_else(|| format!("mode {mode}"));
        branches.push(Branch { mode, label, state });
    }
    Ok(NetworkOutput { branches, final_state: s, rho })
}

/// Linear map from the input polarization to each detector mode, as Jones matrices.
pub fn network_operators(n: &NetworkSpec) -> Result<Vec<(u8, Mat2)>> {
    let h = run_network(n, &JonesVector::horizontal())?;
    let v = run_network(n, &JonesVector::vertical())?;
    Ok(h.branches
        .iter()
        .zip(&v.branches)
        .map(|(bh, bv)| (bh.mode, Mat2::new(bh.state.e0, bv.state.e0, bh.state.e1, bv.state.e1)))
        .collect())
}

fn labels(pairs: &[(u8, &str)]) -> BTreeMap<u8, String> {
    pairs.iter().map(|&(m, l)| (m, l.to_string())).collect()
}

fn region_i(side: Qubit, p: f64) -> NetworkSpec {
    let theta_p = network_angles(p).theta_p;
    let (last, labels) = match side {
        Qubit::A => (Element::Rotator { theta: -FRAC_PI_2, mode: 2 }, labels(&[(1, "alpha3"), (2, "alpha1")])),
        Qubit::B => (Element::Rotator { theta: FRAC_PI_2, mode: 1 }, labels(&[(1, "beta3"), (2, "beta1")])),
    };
    NetworkSpec {
        modes: vec![1, 2],
        input_mode: 1,
        elements: vec![Element::Pbs { n: 1, m: 2 }, Element::Vvbs { theta: theta_p, n: 1, m: 2 }, last],
        detector: vec![1, 2],
        labels,
    }
}

fn region_ii(side: Qubit, p: f64) -> NetworkSpec {
    let a = network_angles(p);
    let mut elements = vec![
        Element::Pbs { n: 1, m: 2 },
        Element::Vvbs { theta: a.theta_third, n: 3, m: 2 },
        Element::Vvbs { theta: a.theta_psi, n: 4, m: 2 },
        Element::Hvbs { theta: a.theta_phi, n: 1, m: 4 },
    ];
    let labels = match side {
        Qubit::A => {
            elements.extend([
                Element::Hwp { theta: 0.0, mode: 4 },
                Element::Pbs { n: 1, m: 2 },
                Element::Rotator { theta: -FRAC_PI_2, mode: 3 },
            ]);
            labels(&[(1, "alpha3"), (3, "alpha1"), (4, "alpha2")])
        }
        Qubit::B => {
            elements.extend([
                Element::Pbs { n: 1, m: 2 },
                Element::Rotator { theta: FRAC_PI_2, mode: 1 },
                Element::Hwp { theta: -std::f64::consts::FRAC_PI_4, mode: 4 },
            ]);
            labels(&[(1, "beta3"), (3, "beta1"), (4, "beta2")])
        }
    };
    NetworkSpec { modes: vec![1, 2, 3, 4], input_mode: 1, elements, detector: vec![1, 3, 4], labels }
}

/// Network realizing the side-`side` MEMS map for `p`; the region picks the layout.
pub fn build_mems_network(side: Qubit, p: f64) -> Result<NetworkSpec> {
    Ok(match MemsParams::new(p)?.region {
        Region::I => region_i(side, p),
        Region::II => region_ii(side, p),
    })
}

/// Figure-numbered layouts: 5 and 6 for region I (sides A and B), 7 and 8 for
/// region II. A `p` outside the figure's region is rejected.
pub fn figure_network(figure: u8, p: f64) -> Result<NetworkSpec> {
    let (side, region) = figure_layout(figure)?;
    let params = MemsParams::new(p)?;
    if params.region != region {
        return Err(Error::InvalidNetwork(format!(
            "figure {figure} implements region {region:?}, but p = {p} lies in region {:?}",
            params.region
        )));
    }
    build_mems_network(side, p)
}

pub fn figure_layout(figure: u8) -> Result<(Qubit, Region)> {
    match figure {
        5 => Ok((Qubit::A, Region::I)),
        6 => Ok((Qubit::B, Region::I)),
        7 => Ok((Qubit::A, Region::II)),
        8 => Ok((Qubit::B, Region::II)),
        _ => Err(Error::InvalidNetwork(format!("unknown figure {figure}"))),
    }
}

/// Closed-form Kraus set the side-`side` network must reproduce.
pub fn network_kraus(side: Qubit, p: f64) -> Result<crate::cloude::KrausSet> {
    let (a, b) = mems_kraus(p)?;
    Ok(match side {
        Qubit::A => a,
        Qubit::B => b,
    })
}

/// Random normalized input drawn from a fixed stream.
pub fn random_input(rng: &mut impl Rng) -> JonesVector {
    let mut g = || rng.random::<f64>() * 2.0 - 1.0;
    let (a, b) = (C64::new(g(), g()), C64::new(g(), g()));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt().max(1e-300);
    JonesVector::new(a / n, b / n)
}

const EQUIVALENCE_SEED: u64 = 0x5eed_f6e7;

/// Largest entrywise deviation between the network output and `Σ λ K ρ0 K†`
/// over `trials` random pure inputs.
pub fn network_equals_kraus(side: Qubit, p: f64, trials: usize) -> Result<f64> {
    let spec = build_mems_network(side, p)?;
    network_equals_kraus_for(&spec, &network_kraus(side, p)?, trials)
}

/// As [`network_equals_kraus`] for an explicit network and Kraus set.
pub fn network_equals_kraus_for(spec: &NetworkSpec, ks: &crate::cloude::KrausSet, trials: usize) -> Result<f64> {
    if trials == 0 {
        return Err(Error::OutOfRange { name: "trials", value: 0.0, range: "[1, ∞)" });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(EQUIVALENCE_SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let psi = random_input(&mut rng);
        let v = psi.as_vector();
        let rho0 = v * v.adjoint();
        let out = run_network(spec, &psi)?;
        worst = worst.max(max_abs_diff(&out.rho, &ks.apply(&rho0)));
    }
    Ok(worst)
}

/// Jones matrix of a single-mode polarization element, for reuse by callers.
pub fn element_jones(e: &Element) -> Option<JonesMatrix> {
    match *e {
        Element::Hwp { theta, .. } => Some(hwp(theta)),
        Element::Rotator { theta, .. } => Some(rotator(theta)),
        Element::Phase { phi, .. } => Some(JonesMatrix::new(Mat2::identity() * C64::from_polar(1.0, phi))),
        _ => None,
    }
}
