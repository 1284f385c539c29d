use std::fmt;
use std::sync::Arc;

use crate::basis;
use crate::error::{Error, Result};

/// Largest register for which diagonals and statevectors are built.
pub const MAX_QUBITS: usize = 20;

/// A two-body coefficient on an unordered pair of qubits, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub strength: f64,
}

impl Coupling {
    pub fn new(i: usize, j: usize, strength: f64) -> Self {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        Coupling { i, j, strength }
    }
}

/// Time-dependent amplitude `α(t)` of the local Y-field catalyst.
#[derive(Clone)]
pub struct YField(Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl YField {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        YField(Arc::new(f))
    }

    pub fn constant(alpha: f64) -> Self {
        YField::new(move |_| alpha)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.0)(t)
    }
}

impl fmt::Debug for YField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("YField(<fn>)")
    }
}

/// Catalyst terms, all entering the Hamiltonian with prefactor `λ(1−λ)`:
/// `Σ K_ij X_i X_j + Σ h̃_i Z_i + α(t) Σ Y_i`.
#[derive(Debug, Clone, Default)]
pub struct CatalystSpec {
    pub xx_couplings: Vec<Coupling>,
    pub bias_z: Option<Vec<f64>>,
    pub y_field: Option<YField>,
}

impl CatalystSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_xx(mut self, i: usize, j: usize, k: f64) -> Self {
        self.xx_couplings.push(Coupling::new(i, j, k));
        self
    }

    pub fn with_bias_z(mut self, fields: Vec<f64>) -> Self {
        self.bias_z = Some(fields);
        self
    }

    pub fn with_y_field(mut self, alpha: YField) -> Self {
        self.y_field = Some(alpha);
        self
    }

    pub fn has_xx(&self) -> bool {
        !self.xx_couplings.is_empty()
    }

    pub fn has_bias_z(&self) -> bool {
        self.bias_z.is_some()
    }

    pub fn has_y_field(&self) -> bool {
        self.y_field.is_some()
    }

    /// XX couplings and a Y field do not commute with each other, so the
    /// off-diagonal sector no longer factorizes exactly into rotations.
    pub fn check_factorizable(&self) -> Result<()> {
        if self.has_xx() && self.has_y_field() {
            return Err(Error::Configuration(
                "XX-interaction catalyst and Y-field catalyst cannot coexist".into(),
            ));
        }
        Ok(())
    }
}

/// Transverse-field Ising annealing problem on `n` qubits.
///
/// The problem Hamiltonian is `H_P = −Σ_{i<j} J_ij Z_i Z_j − Σ_i h_i Z_i` and
/// the driver is `V = −Σ_i Γ_i X_i`.
#[derive(Debug, Clone)]
pub struct SpinSystem {
    n: usize,
    couplings: Vec<Coupling>,
    fields_z: Vec<f64>,
    fields_x: Vec<f64>,
    catalyst: Option<CatalystSpec>,
}

impl SpinSystem {
    pub fn builder(n: usize) -> SpinSystemBuilder {
        SpinSystemBuilder {
            n,
            couplings: Vec::new(),
            fields_z: vec![0.0; n],
            fields_x: vec![0.0; n],
            catalyst: None,
            invalid: None,
        }
    }

    /// Single qubit with longitudinal field `h` and transverse field `gamma`.
    pub fn two_level(h: f64, gamma: f64) -> Result<Self> {
        Self::builder(1)
            .uniform_field_z(h)
            .uniform_field_x(gamma)
            .build()
    }

    /// All-to-all ferromagnet with `J_ij = j / n`, uniform `h` and `Γ`.
    pub fn fully_connected(n: usize, j: f64, h: f64, gamma: f64) -> Result<Self> {
        Self::builder(n)
            .all_to_all(j)
            .uniform_field_z(h)
            .uniform_field_x(gamma)
            .build()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn fields_z(&self) -> &[f64] {
        &self.fields_z
    }

    pub fn fields_x(&self) -> &[f64] {
        &self.fields_x
    }

    pub fn catalyst(&self) -> Option<&CatalystSpec> {
        self.catalyst.as_ref()
    }

    pub fn has_xx_catalyst(&self) -> bool {
        self.catalyst.as_ref().is_some_and(CatalystSpec::has_xx)
    }

    pub fn has_bias_z(&self) -> bool {
        self.catalyst.as_ref().is_some_and(CatalystSpec::has_bias_z)
    }

    pub fn y_field(&self) -> Option<&YField> {
        self.catalyst.as_ref().and_then(|c| c.y_field.as_ref())
    }

    /// Rejects catalyst sets whose off-diagonal sector does not commute.
    pub fn check_factorizable(&self) -> Result<()> {
        match &self.catalyst {
            Some(c) => c.check_factorizable(),
            None => Ok(()),
        }
    }

    /// Copy of the system with qubit `q` relabelled as `perm[q]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::SizeMismatch {
                left: perm.len(),
                right: self.n,
            });
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidSystem(format!(
                    "{perm:?} is not a permutation"
                )));
            }
        }
        let permute = |v: &[f64]| {
            let mut out = vec![0.0; v.len()];
            for (q, &x) in v.iter().enumerate() {
                out[perm[q]] = x;
            }
            out
        };
        let catalyst = self.catalyst.as_ref().map(|c| CatalystSpec {
            xx_couplings: c
                .xx_couplings
                .iter()
                .map(|k| Coupling::new(perm[k.i], perm[k.j], k.strength))
                .collect(),
            bias_z: c.bias_z.as_deref().map(permute),
            y_field: c.y_field.clone(),
        });
        let mut b = SpinSystem::builder(self.n);
        b.couplings = self
            .couplings
            .iter()
            .map(|c| Coupling::new(perm[c.i], perm[c.j], c.strength))
            .collect();
        b.fields_z = permute(&self.fields_z);
        b.fields_x = permute(&self.fields_x);
        b.catalyst = catalyst;
        b.build()
    }
}

#[derive(Debug, Clone)]
pub struct SpinSystemBuilder {
    n: usize,
    couplings: Vec<Coupling>,
    fields_z: Vec<f64>,
    fields_x: Vec<f64>,
    catalyst: Option<CatalystSpec>,
    invalid: Option<String>,
}

impl SpinSystemBuilder {
    pub fn coupling(mut self, i: usize, j: usize, strength: f64) -> Self {
        self.couplings.push(Coupling::new(i, j, strength));
        self
    }

    /// Every pair coupled with `J_ij = j / n`.
    pub fn all_to_all(mut self, j: f64) -> Self {
        let jij = j / self.n as f64;
        for a in 0..self.n {
            for b in a + 1..self.n {
                self.couplings.push(Coupling::new(a, b, jij));
            }
        }
        self
    }

    pub fn field_z(mut self, i: usize, h: f64) -> Self {
        if let Some(slot) = self.fields_z.get_mut(i) {
            *slot = h;
        } else {
            self.invalid
                .get_or_insert(format!("longitudinal field index {i} out of range"));
        }
        self
    }

    pub fn field_x(mut self, i: usize, gamma: f64) -> Self {
        if let Some(slot) = self.fields_x.get_mut(i) {
            *slot = gamma;
        } else {
            self.invalid
                .get_or_insert(format!("transverse field index {i} out of range"));
        }
        self
    }

    pub fn fields_z(mut self, h: Vec<f64>) -> Self {
        self.fields_z = h;
        self
    }

    pub fn fields_x(mut self, gamma: Vec<f64>) -> Self {
        self.fields_x = gamma;
        self
    }

    pub fn uniform_field_z(mut self, h: f64) -> Self {
        self.fields_z = vec![h; self.n];
        self
    }

    pub fn uniform_field_x(mut self, gamma: f64) -> Self {
        self.fields_x = vec![gamma; self.n];
        self
    }

    pub fn catalyst(mut self, catalyst: CatalystSpec) -> Self {
        self.catalyst = Some(catalyst);
        self
    }

    pub fn build(self) -> Result<SpinSystem> {
        let n = self.n;
        if let Some(msg) = self.invalid {
            return Err(Error::InvalidSystem(msg));
        }
        if n == 0 {
            return Err(Error::InvalidSystem("qubit count must be positive".into()));
        }
        if n > MAX_QUBITS {
            return Err(Error::Size {
                what: "spin system",
                qubits: n,
                cap: MAX_QUBITS,
            });
        }
        let couplings = normalize_pairs(n, self.couplings, "coupling")?;
        check_vector(n, &self.fields_z, "longitudinal field")?;
        check_vector(n, &self.fields_x, "transverse field")?;
        let catalyst = match self.catalyst {
            None => None,
            Some(c) => {
                let xx = normalize_pairs(n, c.xx_couplings, "XX catalyst")?;
                if let Some(bias) = &c.bias_z {
                    check_vector(n, bias, "Z catalyst")?;
                }
                Some(CatalystSpec {
                    xx_couplings: xx,
                    bias_z: c.bias_z,
                    y_field: c.y_field,
                })
            }
        };
        Ok(SpinSystem {
            n,
            couplings,
            fields_z: self.fields_z,
            fields_x: self.fields_x,
            catalyst,
        })
    }
}

fn check_vector(n: usize, v: &[f64], what: &str) -> Result<()> {
    if v.len() != n {
        return Err(Error::InvalidSystem(format!(
            "{what} has {} entries for {n} qubits",
            v.len()
        )));
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidSystem(format!(
            "{what} entry {x} is not finite"
        )));
    }
    Ok(())
}

fn normalize_pairs(n: usize, mut pairs: Vec<Coupling>, what: &str) -> Result<Vec<Coupling>> {
    for c in &pairs {
        if c.j >= n {
            return Err(Error::InvalidSystem(format!(
                "{what} ({}, {}) references a qubit outside 0..{n}",
                c.i, c.j
            )));
        }
        if c.i == c.j {
            return Err(Error::InvalidSystem(format!(
                "{what} ({}, {}) is a self-pair",
                c.i, c.j
            )));
        }
        if !c.strength.is_finite() {
            return Err(Error::InvalidSystem(format!(
                "{what} ({}, {}) has non-finite strength",
                c.i, c.j
            )));
        }
    }
    pairs.sort_by_key(|c| (c.i, c.j));
    if let Some(w) = pairs
        .windows(2)
        .find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j))
    {
        return Err(Error::InvalidSystem(format!(
            "{what} ({}, {}) listed twice",
            w[0].i, w[0].j
        )));
    }
    Ok(pairs)
}

fn check_diagonal_cap(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::Size {
            what: "diagonal energies",
            qubits: n,
            cap: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Diagonal of `H_P`: entry `σ` is `−Σ_{i<j} J_ij σ_i σ_j − Σ_i h_i σ_i`.
pub fn diagonal_problem_energies(system: &SpinSystem) -> Result<Vec<f64>> {
    check_diagonal_cap(system.n)?;
    Ok((0..system.dim())
        .map(|idx| {
            let pair: f64 = system
                .couplings
                .iter()
                .map(|c| c.strength * basis::spin(idx, c.i) * basis::spin(idx, c.j))
                .sum();
            let field: f64 = system
                .fields_z
                .iter()
                .enumerate()
                .map(|(q, h)| h * basis::spin(idx, q))
                .sum();
            -pair - field
        })
        .collect())
}

/// Diagonal of the Z catalyst `Σ_i h̃_i σ_i` (zeros when absent).
pub fn diagonal_bias_energies(system: &SpinSystem) -> Result<Vec<f64>> {
    check_diagonal_cap(system.n)?;
    let dim = system.dim();
    let Some(bias) = system.catalyst.as_ref().and_then(|c| c.bias_z.as_ref()) else {
        return Ok(vec![0.0; dim]);
    };
    Ok((0..dim)
        .map(|idx| {
            bias.iter()
                .enumerate()
                .map(|(q, h)| h * basis::spin(idx, q))
                .sum()
        })
        .collect())
}
