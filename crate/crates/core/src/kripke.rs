//! Finite Kripke models `(W, <=, E, val)`: validation, forcing and bounded
//! countermodel search.
//!
//! Worlds are indices below [`MAX_WORLDS`]; sets of worlds are `u64` masks.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::syntax::{Formula, Name};

pub const MAX_WORLDS: usize = 64;

type Mask = u64;

fn bit(w: usize) -> Mask {
    1 << w
}

fn full(n: usize) -> Mask {
    if n == MAX_WORLDS {
        !0
    } else {
        (1 << n) - 1
    }
}

fn members(mut m: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let w = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(w)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("a model needs at least one world")]
    NoWorlds,
    #[error("at most {MAX_WORLDS} worlds are supported, got {0}")]
    TooManyWorlds(usize),
    #[error("world index {0} out of range")]
    WorldOutOfRange(usize),
    #[error("duplicate world name `{0}`")]
    DuplicateWorld(Name),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown world `{0}`")]
pub struct UnknownWorld(pub String);

/// Which inclusion between `E` and `<=` a model must satisfy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum FrameCondition {
    /// `x E y` implies `x <= y`.
    #[default]
    Default,
    /// `x <= y` implies `x E y`, as the condition is printed.
    PaperLiteral,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Violation {
    /// The pair `(x, y)` breaks the frame condition in force.
    FrameCondition(Name, Name),
    /// `x <= y` and `y E z` but not `x E z`.
    Composition(Name, Name, Name),
    /// `atom` holds at the first world but not at the second, which is above it.
    Monotonicity(Name, Name, Name),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FrameCondition(x, y) => write!(f, "FrameCondition({x},{y})"),
            Violation::Composition(x, y, z) => write!(f, "Composition({x},{y},{z})"),
            Violation::Monotonicity(p, x, y) => write!(f, "Monotonicity({p},{x},{y})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    names: Vec<Name>,
    le_gen: BTreeSet<(usize, usize)>,
    e: BTreeSet<(usize, usize)>,
    val: BTreeMap<Name, BTreeSet<usize>>,
    // Reflexive-transitive closure of `le_gen`: worlds above each world.
    up: Vec<Mask>,
    esucc: Vec<Mask>,
    val_mask: BTreeMap<Name, Mask>,
}

impl KripkeModel {
    /// `le` lists generators of the preorder; its reflexive-transitive
    /// closure is computed here.
    pub fn new(
        names: Vec<Name>,
        le: BTreeSet<(usize, usize)>,
        e: BTreeSet<(usize, usize)>,
        val: BTreeMap<Name, BTreeSet<usize>>,
    ) -> Result<KripkeModel, ModelError> {
        let n = names.len();
        if n == 0 {
            return Err(ModelError::NoWorlds);
        }
        if n > MAX_WORLDS {
            return Err(ModelError::TooManyWorlds(n));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(ModelError::DuplicateWorld(a.clone()));
            }
        }
        let check = |w: usize| if w < n { Ok(()) } else { Err(ModelError::WorldOutOfRange(w)) };
        let mut up: Vec<Mask> = (0..n).map(bit).collect();
        for &(a, b) in &le {
            check(a)?;
            check(b)?;
            up[a] |= bit(b);
        }
        // Warshall on rows: if k is above i, everything above k is too.
        for k in 0..n {
            for i in 0..n {
                if up[i] & bit(k) != 0 {
                    up[i] |= up[k];
                }
            }
        }
        let mut esucc = vec![0; n];
        for &(a, b) in &e {
            check(a)?;
            check(b)?;
            esucc[a] |= bit(b);
        }
        let mut val_mask = BTreeMap::new();
        for (p, ws) in &val {
            let mut m = 0;
            for &w in ws {
                check(w)?;
                m |= bit(w);
            }
            val_mask.insert(p.clone(), m);
        }
        Ok(KripkeModel {
            names,
            le_gen: le,
            e,
            val,
            up,
            esucc,
            val_mask,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn worlds(&self) -> &[Name] {
        &self.names
    }

    pub fn world_name(&self, w: usize) -> &Name {
        &self.names[w]
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| &**n == name)
    }

    /// The `<=` pairs as given, before closure.
    pub fn le_generators(&self) -> &BTreeSet<(usize, usize)> {
        &self.le_gen
    }

    pub fn e_relation(&self) -> &BTreeSet<(usize, usize)> {
        &self.e
    }

    pub fn valuation(&self) -> &BTreeMap<Name, BTreeSet<usize>> {
        &self.val
    }

    /// `a <= b` in the closed preorder.
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.up[a] & bit(b) != 0
    }

    pub fn e(&self, a: usize, b: usize) -> bool {
        self.esucc[a] & bit(b) != 0
    }

    fn all(&self) -> Mask {
        full(self.len())
    }

    /// The set of worlds forcing `f`, as a mask.
    pub fn extension(&self, f: &Formula) -> Mask {
        match f {
            Formula::Atom(p) => self.val_mask.get(p).copied().unwrap_or(0),
            Formula::Top => self.all(),
            Formula::Bot => 0,
            Formula::Conj(a, b) => self.extension(a) & self.extension(b),
            Formula::Disj(a, b) => self.extension(a) | self.extension(b),
            Formula::Impl(a, b) => {
                let (ea, eb) = (self.extension(a), self.extension(b));
                self.select(|w| self.up[w] & ea & !eb == 0)
            }
            Formula::Box(a) => {
                let ea = self.extension(a);
                self.select(|w| self.esucc[w] & !ea == 0)
            }
        }
    }

    fn select(&self, pred: impl Fn(usize) -> bool) -> Mask {
        (0..self.len()).filter(|&w| pred(w)).fold(0, |m, w| m | bit(w))
    }

    pub fn forces_at(&self, w: usize, f: &Formula) -> bool {
        self.extension(f) & bit(w) != 0
    }
}

/// Memoized forcing over one model, keyed by formula.
pub struct Forcing<'m> {
    model: &'m KripkeModel,
    memo: HashMap<Formula, Mask>,
}

impl<'m> Forcing<'m> {
    pub fn new(model: &'m KripkeModel) -> Forcing<'m> {
        Forcing {
            model,
            memo: HashMap::new(),
        }
    }

    pub fn extension(&mut self, f: &Formula) -> Mask {
        if let Some(&m) = self.memo.get(f) {
            return m;
        }
        let m = match f {
            Formula::Atom(_) | Formula::Top | Formula::Bot => self.model.extension(f),
            Formula::Conj(a, b) => self.extension(a) & self.extension(b),
            Formula::Disj(a, b) => self.extension(a) | self.extension(b),
            Formula::Impl(a, b) => {
                let (ea, eb) = (self.extension(a), self.extension(b));
                let model = self.model;
                model.select(|w| model.up[w] & ea & !eb == 0)
            }
            Formula::Box(a) => {
                let ea = self.extension(a);
                let model = self.model;
                model.select(|w| model.esucc[w] & !ea == 0)
            }
        };
        self.memo.insert(f.clone(), m);
        m
    }

    pub fn forces(&mut self, w: usize, f: &Formula) -> bool {
        self.extension(f) & bit(w) != 0
    }
}

/// All violated model invariants under the default frame condition.
pub fn validate_model(m: &KripkeModel) -> Vec<Violation> {
    validate_model_with(m, FrameCondition::Default)
}

pub fn validate_model_with(m: &KripkeModel, frame: FrameCondition) -> Vec<Violation> {
    let n = m.len();
    let name = |w: usize| m.names[w].clone();
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let broken = match frame {
                FrameCondition::Default => m.e(x, y) && !m.le(x, y),
                FrameCondition::PaperLiteral => m.le(x, y) && !m.e(x, y),
            };
            if broken {
                out.push(Violation::FrameCondition(name(x), name(y)));
            }
        }
    }
    for x in 0..n {
        for y in members(m.up[x]) {
            for z in members(m.esucc[y] & !m.esucc[x]) {
                out.push(Violation::Composition(name(x), name(y), name(z)));
            }
        }
    }
    for (p, &mask) in &m.val_mask {
        for x in members(mask) {
            for y in members(m.up[x] & !mask) {
                out.push(Violation::Monotonicity(p.clone(), name(x), name(y)));
            }
        }
    }
    out
}

pub fn is_valid_model(m: &KripkeModel, frame: FrameCondition) -> bool {
    validate_model_with(m, frame).is_empty()
}

/// Whether world `w` (by name) forces `f`.
pub fn forces(m: &KripkeModel, w: &str, f: &Formula) -> Result<bool, UnknownWorld> {
    let i = m.world_index(w).ok_or_else(|| UnknownWorld(w.to_string()))?;
    Ok(m.forces_at(i, f))
}

/// `f` is forced at every world.
pub fn valid_in_model(m: &KripkeModel, f: &Formula) -> bool {
    m.extension(f) == m.all()
}

/// A frame `(<=, E)` over `n` worlds given as successor masks; `up` is a
/// closed preorder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub up: Vec<Mask>,
    pub esucc: Vec<Mask>,
}

impl Frame {
    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    /// Sets of worlds closed upward under `<=`, in increasing mask order.
    pub fn upsets(&self) -> Vec<Mask> {
        (0..=full(self.len()))
            .filter(|&s| members(s).all(|w| self.up[w] & !s == 0))
            .collect()
    }

    fn to_model(&self, atoms: &[Name], val: &[Mask]) -> KripkeModel {
        let n = self.len();
        let names = (0..n).map(|i| Name::from(format!("w{i}"))).collect();
        let mut le = BTreeSet::new();
        let mut e = BTreeSet::new();
        for a in 0..n {
            for b in members(self.up[a]) {
                if a != b {
                    le.insert((a, b));
                }
            }
            for b in members(self.esucc[a]) {
                e.insert((a, b));
            }
        }
        let val = atoms
            .iter()
            .zip(val)
            .map(|(p, &m)| (p.clone(), members(m).collect()))
            .collect();
        KripkeModel::new(names, le, e, val).expect("enumerated model is well formed")
    }
}

/// Every labeled preorder on `n` worlds, as closed successor masks.
pub fn enumerate_preorders(n: usize) -> Vec<Vec<Mask>> {
    assert!((1..=5).contains(&n), "exhaustive enumeration is limited to 5 worlds");
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let mut out = Vec::new();
    for choice in 0u64..(1 << pairs.len()) {
        let mut up: Vec<Mask> = (0..n).map(bit).collect();
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if choice & (1 << i) != 0 {
                up[a] |= bit(b);
            }
        }
        let transitive = (0..n).all(|a| members(up[a]).all(|b| up[b] & !up[a] == 0));
        if transitive {
            out.push(up);
        }
    }
    out
}

/// Every frame on `n` worlds meeting the composition condition and `frame`.
pub fn enumerate_frames(n: usize, frame: FrameCondition) -> Vec<Frame> {
    let mut out = Vec::new();
    for up in enumerate_preorders(n) {
        for choice in 0u64..(1 << (n * n)) {
            let esucc: Vec<Mask> = (0..n)
                .map(|a| (choice >> (a * n)) & full(n))
                .collect();
            let inclusion = (0..n).all(|a| match frame {
                FrameCondition::Default => esucc[a] & !up[a] == 0,
                FrameCondition::PaperLiteral => up[a] & !esucc[a] == 0,
            });
            let composition =
                (0..n).all(|x| members(up[x]).all(|y| esucc[y] & !esucc[x] == 0));
            if inclusion && composition {
                out.push(Frame {
                    up: up.clone(),
                    esucc,
                });
            }
        }
    }
    out
}

/// Every valid model on exactly `n` worlds with monotone valuations of
/// `atoms`, in a fixed order: frames first, then valuations.
pub fn enumerate_models(
    n: usize,
    atoms: &[Name],
    frame: FrameCondition,
) -> impl Iterator<Item = KripkeModel> + '_ {
    enumerate_frames(n, frame).into_iter().flat_map(move |fr| {
        let ups = fr.upsets();
        let total = ups.len().pow(atoms.len() as u32);
        (0..total).map(move |mut code| {
            let mut val = Vec::with_capacity(atoms.len());
            for _ in atoms {
                val.push(ups[code % ups.len()]);
                code /= ups.len();
            }
            fr.to_model(atoms, &val)
        })
    })
}

/// The first valid model of at most `max_worlds` worlds, in increasing size,
/// with a world that does not force `f`.
pub fn countermodel_search(
    f: &Formula,
    max_worlds: usize,
    frame: FrameCondition,
) -> Option<(KripkeModel, usize)> {
    let atoms: Vec<Name> = f.atoms().into_iter().collect();
    for n in 1..=max_worlds {
        for m in enumerate_models(n, &atoms, frame) {
            let ext = m.extension(f);
            if ext != m.all() {
                let w = (!ext & m.all()).trailing_zeros() as usize;
                return Some((m, w));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_formula, parse_model};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn two_world() -> KripkeModel {
        parse_model("worlds: w0 w1\nle: w0 <= w1\nE: w0 E w1, w1 E w1\nval: p @ w1\n").unwrap()
    }

    #[test]
    fn validation_examples() {
        let m = parse_model("worlds: w\nle:\nE: w E w\nval: p @ w\n").unwrap();
        assert!(validate_model(&m).is_empty());
        let m = parse_model("worlds: w0 w1\nE: w0 E w1\n").unwrap();
        assert_eq!(
            validate_model(&m),
            vec![Violation::FrameCondition("w0".into(), "w1".into())]
        );
        let m = parse_model("worlds: w0 w1\nle: w0 <= w1\nval: p @ w0\n").unwrap();
        assert_eq!(
            validate_model(&m),
            vec![Violation::Monotonicity("p".into(), "w0".into(), "w1".into())]
        );
        let m = parse_model("worlds: w0 w1\nle: w0 <= w1\nE: w1 E w1\n").unwrap();
        assert_eq!(
            validate_model(&m),
            vec![Violation::Composition("w0".into(), "w1".into(), "w1".into())]
        );
    }

    #[test]
    fn forcing_examples() {
        let one = parse_model("worlds: w\nE: w E w\nval: p @ w\n").unwrap();
        assert_eq!(forces(&one, "w", &f("[]p")), Ok(true));
        let blind = parse_model("worlds: w\n").unwrap();
        assert_eq!(forces(&blind, "w", &f("[]Bot")), Ok(true));
        let m = two_world();
        assert_eq!(forces(&m, "w0", &f("[]p")), Ok(true));
        assert_eq!(forces(&m, "w0", &f("p")), Ok(false));
        assert!(forces(&m, "w9", &f("p")).is_err());
        assert!(!valid_in_model(&m, &f("[]p -> p")));
        assert!(valid_in_model(&m, &Formula::Top));
    }

    #[test]
    fn memoized_forcing_agrees() {
        let m = two_world();
        let mut table = Forcing::new(&m);
        for s in ["p", "[]p -> p", "~~p", "[](p \\/ ~p)", "~[]Bot"] {
            let g = f(s);
            assert_eq!(table.extension(&g), m.extension(&g), "{s}");
        }
    }

    #[test]
    fn preorder_counts() {
        let counts: Vec<usize> = (1..=4).map(|n| enumerate_preorders(n).len()).collect();
        assert_eq!(counts, vec![1, 4, 29, 355]);
    }

    #[test]
    fn enumerated_models_are_valid() {
        let atoms = vec![Name::from("p")];
        for n in 1..=3 {
            for m in enumerate_models(n, &atoms, FrameCondition::Default) {
                assert!(validate_model(&m).is_empty());
            }
            for m in enumerate_models(n, &atoms, FrameCondition::PaperLiteral) {
                assert!(validate_model_with(&m, FrameCondition::PaperLiteral).is_empty());
            }
        }
    }

    #[test]
    fn countermodels() {
        for s in ["[]p -> p", "p \\/ ~p", "~~p -> p", "[]p \\/ ~[]p"] {
            let g = f(s);
            let (m, w) = countermodel_search(&g, 3, FrameCondition::Default).expect(s);
            assert!(validate_model(&m).is_empty());
            assert!(!m.forces_at(w, &g), "{s}");
        }
        for s in ["p -> []p", "[](p -> q) -> []p -> []q"] {
            assert!(countermodel_search(&f(s), 3, FrameCondition::Default).is_none(), "{s}");
        }
        assert!(countermodel_search(&f("[]p -> p"), 3, FrameCondition::PaperLiteral).is_none());
    }
}
