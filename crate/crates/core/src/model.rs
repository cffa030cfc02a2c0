//! The n-site hopper: a particle on a periodic lattice `Z_n` whose one-step
//! amplitude from `x` to `x'` is `1^((x-x')²/n)` for odd `n` and
//! `1^((x-x')²/2n)` for even `n` (with `1^z = exp(2πiz)`).
//!
//! The `1/√n` normalization is dropped throughout; every history of a fixed
//! duration carries the same power of it, so no zero test is affected.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};

/// Lattice size and number of time steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeSpec {
    sites: usize,
    steps: usize,
}

impl LatticeSpec {
    pub fn new(sites: usize, steps: usize) -> Result<Self> {
        if sites < 2 {
            return Err(Error::InvalidLattice(format!(
                "need at least 2 sites, got {sites}"
            )));
        }
        if steps < 1 {
            return Err(Error::InvalidLattice("need at least 1 time step".into()));
        }
        Ok(Self { sites, steps })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Order of the root of unity carrying all phases: `n` for odd `n`,
    /// `2n` for even `n`.
    pub fn phase_order(&self) -> usize {
        if self.sites % 2 == 1 {
            self.sites
        } else {
            2 * self.sites
        }
    }

    pub fn with_steps(&self, steps: usize) -> Result<Self> {
        Self::new(self.sites, steps)
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site < self.sites {
            Ok(())
        } else {
            Err(Error::InvalidSite {
                site,
                sites: self.sites,
            })
        }
    }

    /// Exponent `e` with `hop_amplitude(x, x2) = ζ_m^e`.
    pub fn hop_exponent(&self, x: usize, x2: usize) -> Result<usize> {
        self.check_site(x)?;
        self.check_site(x2)?;
        Ok(self.hop_exponent_unchecked(x, x2))
    }

    pub(crate) fn hop_exponent_unchecked(&self, x: usize, x2: usize) -> usize {
        let d = (x + self.sites - x2) % self.sites;
        (d * d) % self.phase_order()
    }
}

/// Unnormalized amplitude for one hop from `x` to `x2`.
pub fn hop_amplitude(spec: &LatticeSpec, x: usize, x2: usize) -> Result<CycInt> {
    let e = spec.hop_exponent(x, x2)?;
    CycInt::root(spec.phase_order(), e as i64)
}

/// Entry `[x2][x]` is the amplitude to hop from `x` to `x2`.
pub fn transfer_matrix(spec: &LatticeSpec) -> Vec<Vec<CycInt>> {
    let n = spec.sites();
    (0..n)
        .map(|x2| {
            (0..n)
                .map(|x| hop_amplitude(spec, x, x2).expect("sites in range"))
                .collect()
        })
        .collect()
}

/// Exponent form of [`transfer_matrix`].
pub fn transfer_exponents(spec: &LatticeSpec) -> Vec<Vec<usize>> {
    let n = spec.sites();
    (0..n)
        .map(|x2| (0..n).map(|x| spec.hop_exponent_unchecked(x, x2)).collect())
        .collect()
}

/// Checks `U·U† = n·I` exactly.
pub fn check_unitarity(spec: &LatticeSpec) -> bool {
    let u = transfer_matrix(spec);
    let n = spec.sites();
    let m = spec.phase_order();
    let scaled_one = CycInt::from_integer(m, n as i64).expect("valid order");
    let zero = CycInt::zero(m).expect("valid order");
    for i in 0..n {
        for j in 0..n {
            let mut acc = CycInt::zero(m).expect("valid order");
            for k in 0..n {
                acc = &acc + &(&u[i][k] * &u[j][k].conj());
            }
            let expected = if i == j { &scaled_one } else { &zero };
            if acc != *expected {
                return false;
            }
        }
    }
    true
}

/// Named initial wave functions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateLabel {
    /// All amplitudes equal.
    Ground,
    /// `ψ(x) = ζ_n^x`.
    Plus,
    /// `ψ(x) = ζ_n^-x`.
    Minus,
    /// `Plus + Minus`.
    Standing,
    /// User-supplied amplitudes, one `exponent:coeff` term list per site.
    Custom(String),
}

impl StateLabel {
    pub const NAMED: [StateLabel; 4] = [
        StateLabel::Ground,
        StateLabel::Plus,
        StateLabel::Minus,
        StateLabel::Standing,
    ];

    pub fn name(&self) -> &str {
        match self {
            StateLabel::Ground => "ground",
            StateLabel::Plus => "plus",
            StateLabel::Minus => "minus",
            StateLabel::Standing => "standing",
            StateLabel::Custom(_) => "custom",
        }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateLabel::Custom(body) => write!(f, "custom:{body}"),
            other => write!(f, "{}", other.name()),
        }
    }
}

impl FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ground" => Ok(StateLabel::Ground),
            "plus" => Ok(StateLabel::Plus),
            "minus" => Ok(StateLabel::Minus),
            "standing" => Ok(StateLabel::Standing),
            _ => match s.strip_prefix("custom:") {
                Some(body) => Ok(StateLabel::Custom(body.to_string())),
                None => Err(Error::UnknownState(s.to_string())),
            },
        }
    }
}

/// Initial amplitude per starting site, in the lattice's phase order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialState {
    label: StateLabel,
    amps: Vec<CycInt>,
}

impl InitialState {
    pub fn new(spec: &LatticeSpec, label: StateLabel, amps: Vec<CycInt>) -> Result<Self> {
        if amps.len() != spec.sites() {
            return Err(Error::InvalidState(format!(
                "expected {} site amplitudes, got {}",
                spec.sites(),
                amps.len()
            )));
        }
        let m = spec.phase_order();
        let amps = amps
            .into_iter()
            .map(|a| a.embed(m))
            .collect::<Result<Vec<_>>>()?;
        if amps.iter().all(CycInt::is_zero) {
            return Err(Error::InvalidState("all amplitudes are zero".into()));
        }
        Ok(Self { label, amps })
    }

    pub fn label(&self) -> &StateLabel {
        &self.label
    }

    pub fn amps(&self) -> &[CycInt] {
        &self.amps
    }
}

/// Builds a named state, or parses a custom one.
///
/// Custom bodies list one amplitude per site separated by commas; each
/// amplitude is a `+`-joined list of `exponent:coeff` terms over
/// `ζ_m`, `m` the phase order. `0:1,0:1,1:1` is `(1, 1, ω)` for `n = 3`.
pub fn initial_state(spec: &LatticeSpec, label: StateLabel) -> Result<InitialState> {
    let n = spec.sites();
    let m = spec.phase_order();
    // ζ_n = ζ_m^(m/n)
    let step = (m / n) as i64;
    let travelling = |sign: i64| -> Vec<CycInt> {
        (0..n as i64)
            .map(|x| CycInt::root(m, sign * step * x).expect("valid order"))
            .collect()
    };
    let amps = match &label {
        StateLabel::Ground => vec![CycInt::one(m)?; n],
        StateLabel::Plus => travelling(1),
        StateLabel::Minus => travelling(-1),
        StateLabel::Standing => travelling(1)
            .iter()
            .zip(travelling(-1).iter())
            .map(|(a, b)| a + b)
            .collect(),
        StateLabel::Custom(body) => parse_custom(body, m)?,
    };
    InitialState::new(spec, label, amps)
}

fn parse_custom(body: &str, order: usize) -> Result<Vec<CycInt>> {
    let bad = |why: &str| Error::InvalidState(format!("custom state `{body}`: {why}"));
    body.split(',')
        .map(|site| {
            let mut terms = Vec::new();
            for term in site.split('+') {
                let term = term.trim();
                let (e, c) = term
                    .split_once(':')
                    .ok_or_else(|| bad("terms must be exponent:coeff"))?;
                let e: i64 = e.trim().parse().map_err(|_| bad("bad exponent"))?;
                let c: BigInt = c.trim().parse().map_err(|_| bad("bad coefficient"))?;
                terms.push((e, c));
            }
            let mut v = CycInt::zero(order)?;
            for (e, c) in terms {
                let r = CycInt::root(order, e)?.scale(&c);
                v = &v + &r;
            }
            Ok(v)
        })
        .collect()
}

pub fn apply_transfer(spec: &LatticeSpec, amps: &[CycInt]) -> Vec<CycInt> {
    let u = transfer_matrix(spec);
    let m = spec.phase_order();
    u.iter()
        .map(|row| {
            row.iter()
                .zip(amps)
                .fold(CycInt::zero(m).expect("valid order"), |acc, (a, b)| {
                    &acc + &(a * b)
                })
        })
        .collect()
}

/// Whether `U·ψ = λψ` for some scalar λ, decided with cross products
/// `ψ_i (Uψ)_j = ψ_j (Uψ)_i` so no division is needed.
pub fn is_transfer_eigenvector(spec: &LatticeSpec, state: &InitialState) -> bool {
    let psi = state.amps();
    let image = apply_transfer(spec, psi);
    if image.iter().all(CycInt::is_zero) {
        return false;
    }
    let n = psi.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if &psi[i] * &image[j] != &psi[j] * &image[i] {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize) -> LatticeSpec {
        LatticeSpec::new(n, 1).unwrap()
    }

    #[test]
    fn lattice_validation() {
        assert!(LatticeSpec::new(1, 3).is_err());
        assert!(LatticeSpec::new(3, 0).is_err());
        assert_eq!(spec(3).phase_order(), 3);
        assert_eq!(spec(6).phase_order(), 12);
    }

    #[test]
    fn six_site_hops() {
        let s = spec(6);
        let q = |k| CycInt::root(12, k).unwrap();
        let hops: Vec<_> = (0..4).map(|d| hop_amplitude(&s, 0, d).unwrap()).collect();
        assert_eq!(hops, vec![q(0), q(1), q(4), q(9)]);
        assert_eq!(hops[3], CycInt::root(4, 1).unwrap().negate());
        assert_eq!(
            hop_amplitude(&s, 0, 6).unwrap_err(),
            Error::InvalidSite { site: 6, sites: 6 }
        );
    }

    #[test]
    fn small_matrices() {
        let w = CycInt::root(3, 1).unwrap();
        let one = CycInt::one(3).unwrap();
        let u3 = transfer_matrix(&spec(3));
        for (i, row) in u3.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                assert_eq!(*e, if i == j { one.clone() } else { w.clone() });
            }
        }
        let i = CycInt::root(4, 1).unwrap();
        let u2 = transfer_matrix(&spec(2));
        assert_eq!(u2, vec![vec![CycInt::one(4).unwrap(), i.clone()], vec![i, CycInt::one(4).unwrap()]]);
    }

    #[test]
    fn unitary_for_small_lattices() {
        for n in 2..=8 {
            assert!(check_unitarity(&spec(n)), "n = {n}");
        }
    }

    #[test]
    fn hop_symmetries() {
        for n in 2..=8 {
            let s = spec(n);
            for x in 0..n {
                for y in 0..n {
                    let a = hop_amplitude(&s, x, y).unwrap();
                    assert_eq!(a, hop_amplitude(&s, y, x).unwrap());
                    assert_eq!(a, hop_amplitude(&s, (x + 1) % n, (y + 1) % n).unwrap());
                }
            }
            // diagonal of U·U† row by row
            for row in transfer_matrix(&s) {
                let norm = row.iter().fold(CycInt::zero(s.phase_order()).unwrap(), |acc, e| &acc + &(e * &e.conj()));
                assert_eq!(norm, CycInt::from_integer(s.phase_order(), n as i64).unwrap());
            }
        }
    }

    #[test]
    fn named_states() {
        let s = spec(3);
        let w = |k| CycInt::root(3, k).unwrap();
        let int = |v| CycInt::from_integer(3, v).unwrap();
        assert_eq!(initial_state(&s, StateLabel::Ground).unwrap().amps(), &[w(0), w(0), w(0)]);
        assert_eq!(initial_state(&s, StateLabel::Plus).unwrap().amps(), &[w(0), w(1), w(2)]);
        assert_eq!(initial_state(&s, StateLabel::Minus).unwrap().amps(), &[w(0), w(2), w(1)]);
        assert_eq!(
            initial_state(&s, StateLabel::Standing).unwrap().amps(),
            &[int(2), int(-1), int(-1)]
        );
        // even n: ζ_n phases live in order 2n
        let p4 = initial_state(&spec(4), StateLabel::Plus).unwrap();
        assert_eq!(p4.amps()[1], CycInt::root(4, 1).unwrap());
    }

    #[test]
    fn custom_states() {
        let s = spec(3);
        let st = initial_state(&s, "custom:0:1,0:1,1:1".parse().unwrap()).unwrap();
        assert_eq!(st.amps()[2], CycInt::root(3, 1).unwrap());
        let st = initial_state(&s, "custom:0:2+1:-1,0:0,0:1".parse().unwrap()).unwrap();
        assert_eq!(st.amps()[0], CycInt::from_terms(3, &[(0, 2), (1, -1)]).unwrap());
        assert!(initial_state(&s, "custom:0:1,0:1".parse().unwrap()).is_err());
        assert!(initial_state(&s, "custom:0:0,0:0,1:0".parse().unwrap()).is_err());
        assert!(initial_state(&s, "custom:x,y,z".parse().unwrap()).is_err());
        assert_eq!(
            "sideways".parse::<StateLabel>().unwrap_err(),
            Error::UnknownState("sideways".into())
        );
    }

    #[test]
    fn eigenvectors() {
        let s = spec(3);
        for label in StateLabel::NAMED {
            let st = initial_state(&s, label.clone()).unwrap();
            assert!(is_transfer_eigenvector(&s, &st), "{label}");
        }
        let st = initial_state(&s, "custom:0:1,0:1,1:1".parse().unwrap()).unwrap();
        assert!(!is_transfer_eigenvector(&s, &st));
    }
}
