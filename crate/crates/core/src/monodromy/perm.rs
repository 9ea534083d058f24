use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{FanoError, Result};

/// A bijection of `{0, …, N−1}`, stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(FanoError::Numerical(format!("not a permutation: {images:?}")));
            }
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    /// The transposition swapping `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(a, b);
        p
    }

    /// The cycle `0 → 1 → … → n−1 → 0`.
    pub fn long_cycle(n: usize) -> Self {
        Self { images: (0..n).map(|i| (i + 1) % n).collect() }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Self { images: self.images.iter().map(|&i| other.images[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Self { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Nontrivial cycles, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for s in 0..self.degree() {
            if seen[s] {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut j = self.images[s];
            while j != s {
                seen[j] = true;
                c.push(j);
                j = self.images[j];
            }
            if c.len() > 1 {
                out.push(c);
            }
        }
        out
    }

    pub fn is_odd(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 1
    }

    /// Sorted lengths of the nontrivial cycles.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable();
        t
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(usize::to_string).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            images: Vec<usize>,
        }
        Permutation::new(Raw::deserialize(d)?.images).map_err(serde::de::Error::custom)
    }
}

/// One level of a stabilizer chain: generators fixing the earlier base
/// points, and the orbit of this level's base point with transversal.
struct Level {
    base: usize,
    gens: Vec<Permutation>,
    /// `transversal[p]` maps the base point to `p`.
    transversal: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
}

impl Level {
    fn new(base: usize, n: usize) -> Self {
        let mut l = Self { base, gens: Vec::new(), transversal: vec![None; n], orbit: Vec::new() };
        l.rebuild(n);
        l
    }

    fn rebuild(&mut self, n: usize) {
        self.transversal = vec![None; n];
        self.transversal[self.base] = Some(Permutation::identity(n));
        self.orbit = vec![self.base];
        let mut k = 0;
        while k < self.orbit.len() {
            let p = self.orbit[k];
            for g in &self.gens {
                let q = g.apply(p);
                if self.transversal[q].is_none() {
                    self.transversal[q] = Some(self.transversal[p].as_ref().expect("orbit point").then(g));
                    self.orbit.push(q);
                }
            }
            k += 1;
        }
    }
}

/// Base and strong generating set built by the deterministic
/// Schreier–Sims algorithm.
pub struct StabilizerChain {
    n: usize,
    levels: Vec<Level>,
}

impl StabilizerChain {
    pub fn new(n: usize, gens: &[Permutation]) -> Result<Self> {
        if let Some(g) = gens.iter().find(|g| g.degree() != n) {
            return Err(FanoError::Dimension { expected: n, found: g.degree() });
        }
        let mut chain = Self { n, levels: Vec::new() };
        let gens: Vec<Permutation> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        for g in &gens {
            if chain.levels.iter().all(|l| g.apply(l.base) == l.base) {
                chain.levels.push(Level::new(moved_point(g), n));
            }
        }
        for l in 0..chain.levels.len() {
            let fixing: Vec<Permutation> = gens
                .iter()
                .filter(|g| chain.levels[..l].iter().all(|lv| g.apply(lv.base) == lv.base))
                .cloned()
                .collect();
            chain.levels[l].gens = fixing;
            chain.levels[l].rebuild(n);
        }
        chain.complete();
        Ok(chain)
    }

    /// Sifts `g` from level `from`; returns the residue and the level at
    /// which sifting stopped (`levels.len()` if it passed every level).
    fn strip(&self, g: &Permutation, from: usize) -> (Permutation, usize) {
        let mut h = g.clone();
        for (i, l) in self.levels.iter().enumerate().skip(from) {
            match &l.transversal[h.apply(l.base)] {
                Some(u) => h = h.then(&u.inverse()),
                None => return (h, i),
            }
        }
        (h, self.levels.len())
    }

    fn complete(&mut self) {
        let mut i = self.levels.len();
        'outer: while i > 0 {
            let lvl = i - 1;
            let n = self.n;
            let level = &self.levels[lvl];
            for &p in &level.orbit {
                let up = level.transversal[p].as_ref().expect("orbit point");
                for s in &level.gens {
                    let q = s.apply(p);
                    let uq = level.transversal[q].as_ref().expect("orbit closed");
                    let schreier = up.then(s).then(&uq.inverse());
                    let (y, j) = self.strip(&schreier, lvl + 1);
                    if j < self.levels.len() || !y.is_identity() {
                        if j == self.levels.len() {
                            self.levels.push(Level::new(moved_point(&y), n));
                        }
                        for l in lvl + 1..=j {
                            self.levels[l].gens.push(y.clone());
                            self.levels[l].rebuild(n);
                        }
                        i = j + 1;
                        continue 'outer;
                    }
                }
            }
            i -= 1;
        }
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().map(|l| BigUint::from(l.orbit.len())).product()
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.n && {
            let (h, j) = self.strip(g, 0);
            j == self.levels.len() && h.is_identity()
        }
    }
}

fn moved_point(g: &Permutation) -> usize {
    (0..g.degree()).find(|&i| g.apply(i) != i).expect("non-identity permutation")
}

/// The sampled group `⟨generators⟩` and its basic invariants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermGroupEstimate {
    pub degree: usize,
    pub generators: Vec<Permutation>,
    #[serde(with = "crate::io::decimal")]
    pub order: BigUint,
    pub transitive: bool,
    pub contains_odd: bool,
}

/// Exact order, transitivity and parity of the group generated by `gens`
/// acting on `n` points.
pub fn group_order(n: usize, gens: &[Permutation]) -> Result<PermGroupEstimate> {
    let chain = StabilizerChain::new(n, gens)?;
    Ok(PermGroupEstimate {
        degree: n,
        generators: gens.to_vec(),
        order: chain.order(),
        transitive: n <= 1 || orbit_of_zero(n, gens) == n,
        contains_odd: gens.iter().any(Permutation::is_odd),
    })
}

fn orbit_of_zero(n: usize, gens: &[Permutation]) -> usize {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(p) = stack.pop() {
        for g in gens {
            let q = g.apply(p);
            if !seen[q] {
                seen[q] = true;
                count += 1;
                stack.push(q);
            }
        }
    }
    count
}
