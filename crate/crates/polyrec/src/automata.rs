//! Weighted models over a one-letter alphabet: matrix-form automata,
//! weighted grammars restricted to the two rule shapes `N -> a` and
//! `N -> a N' N''`, and the variable-free quantifier fragment. Each defines
//! a map from word length to an exact rational.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::convert::{affine_normalize, ConvertError};
use crate::engines::{EngineError, PolySystem, SequenceOracle};
use crate::poly::{rat_pow, MultiPoly, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomataError {
    #[error("matrix is {rows}x{cols}, expected square of dimension {dim}")]
    DimensionMismatch { rows: usize, cols: usize, dim: usize },
    #[error("initial/final vector length {got} does not match dimension {dim}")]
    VectorLength { got: usize, dim: usize },
    #[error("rule {0} is not linear; convert affine systems first")]
    NonLinearRule(usize),
    #[error("unknown nonterminal `{0}`")]
    UnknownNonterminal(String),
    #[error("variable `{0}` is already bound on this path")]
    DuplicateBinding(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl AutomataError {
    pub fn name(&self) -> &'static str {
        match self {
            AutomataError::DimensionMismatch { .. } => "DimensionMismatch",
            AutomataError::VectorLength { .. } => "VectorLength",
            AutomataError::NonLinearRule(_) => "NonLinearRule",
            AutomataError::UnknownNonterminal(_) => "UnknownNonterminal",
            AutomataError::DuplicateBinding(_) => "DuplicateBinding",
            AutomataError::Engine(e) => e.name(),
        }
    }
}

/// Weighted automaton over a unary alphabet: the word of length `n` maps to
/// `I^T M^n F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnaryWeightedAutomaton {
    dim: usize,
    matrix: Vec<Vec<Rat>>,
    initial: Vec<Rat>,
    final_: Vec<Rat>,
}

impl UnaryWeightedAutomaton {
    pub fn new(
        matrix: Vec<Vec<Rat>>,
        initial: Vec<Rat>,
        final_: Vec<Rat>,
    ) -> Result<Self, AutomataError> {
        let dim = matrix.len();
        if let Some(row) = matrix.iter().find(|r| r.len() != dim) {
            return Err(AutomataError::DimensionMismatch {
                rows: dim,
                cols: row.len(),
                dim,
            });
        }
        if initial.len() != dim {
            return Err(AutomataError::VectorLength {
                got: initial.len(),
                dim,
            });
        }
        if final_.len() != dim {
            return Err(AutomataError::VectorLength {
                got: final_.len(),
                dim,
            });
        }
        Ok(UnaryWeightedAutomaton {
            dim,
            matrix,
            initial,
            final_,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[Vec<Rat>] {
        &self.matrix
    }

    pub fn initial(&self) -> &[Rat] {
        &self.initial
    }

    pub fn final_vector(&self) -> &[Rat] {
        &self.final_
    }

    /// `I^T M^n F` by iterated matrix-vector products; the empty word gives
    /// `I^T F`.
    pub fn eval(&self, n: u64) -> Rat {
        let mut v = self.final_.clone();
        for _ in 0..n {
            v = (0..self.dim)
                .map(|i| {
                    (0..self.dim)
                        .map(|j| &self.matrix[i][j] * &v[j])
                        .fold(Rat::zero(), |acc, x| acc + x)
                })
                .collect();
        }
        self.initial
            .iter()
            .zip(&v)
            .map(|(a, b)| a * b)
            .fold(Rat::zero(), |acc, x| acc + x)
    }
}

/// View a linear system as an automaton: `M` holds the rule coefficients,
/// `F` the initial state, and `I` selects the output coordinate. Affine
/// systems are linearized first.
pub fn wa_from_linear_system(
    s: &PolySystem,
) -> Result<UnaryWeightedAutomaton, ConvertError> {
    if let Some(i) = s
        .rules()
        .iter()
        .position(|r| r.total_degree().is_some_and(|d| d >= 2))
    {
        return Err(ConvertError::NonLinearRule(i));
    }
    let s = affine_normalize(s);
    let k = s.dim();
    let matrix: Vec<Vec<Rat>> = s
        .rules()
        .iter()
        .map(|r| (0..k).map(|j| r.linear_coefficient(j)).collect())
        .collect();
    let mut initial = vec![Rat::zero(); k];
    initial[s.output_index()] = Rat::one();
    UnaryWeightedAutomaton::new(matrix, initial, s.init().to_vec())
        .map_err(|_| unreachable!("shapes are consistent by construction"))
}

/// View an automaton as a linear system. The output sequence `I^T M^n F`
/// need not be a coordinate of `M^n F`, so one extra sequence carries the
/// inner product: `w_{n+1} = (I^T M) v_n`, `v_{n+1} = M v_n`.
pub fn wa_to_linear_system(a: &UnaryWeightedAutomaton) -> Result<PolySystem, EngineError> {
    let d = a.dim();
    let k = d + 1;
    let mut rules = Vec::with_capacity(k);
    // row vector I^T M
    let itm: Vec<Rat> = (0..d)
        .map(|j| {
            (0..d)
                .map(|i| &a.initial[i] * &a.matrix[i][j])
                .fold(Rat::zero(), |acc, x| acc + x)
        })
        .collect();
    let from_coeffs = |coeffs: &[Rat]| -> MultiPoly {
        coeffs
            .iter()
            .enumerate()
            .fold(MultiPoly::zero(k), |acc, (j, c)| {
                acc.add(&MultiPoly::var(k, j + 1).scale(c))
            })
    };
    rules.push(from_coeffs(&itm));
    for i in 0..d {
        rules.push(from_coeffs(&a.matrix[i]));
    }
    let mut init = Vec::with_capacity(k);
    init.push(
        a.initial
            .iter()
            .zip(&a.final_)
            .map(|(x, y)| x * y)
            .fold(Rat::zero(), |acc, v| acc + v),
    );
    init.extend(a.final_.iter().cloned());
    PolySystem::new(rules, init, 0)
}

/// Rule of a unary weighted grammar. Only the two shapes needed here:
/// a terminal rule consumes one letter; a binary rule consumes one letter
/// and spawns two nonterminals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WcfgRule {
    Terminal { lhs: usize, weight: Rat },
    Binary { lhs: usize, left: usize, right: usize, weight: Rat },
}

/// Weighted grammar over the unary alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WcfgUnary {
    nonterminals: usize,
    start: usize,
    rules: Vec<WcfgRule>,
}

impl WcfgUnary {
    pub fn new(
        nonterminals: usize,
        start: usize,
        rules: Vec<WcfgRule>,
    ) -> Result<Self, AutomataError> {
        let check = |nt: usize| -> Result<(), AutomataError> {
            if nt >= nonterminals {
                return Err(AutomataError::UnknownNonterminal(format!("#{nt}")));
            }
            Ok(())
        };
        check(start)?;
        for r in &rules {
            match r {
                WcfgRule::Terminal { lhs, .. } => check(*lhs)?,
                WcfgRule::Binary { lhs, left, right, .. } => {
                    check(*lhs)?;
                    check(*left)?;
                    check(*right)?;
                }
            }
        }
        Ok(WcfgUnary {
            nonterminals,
            start,
            rules,
        })
    }

    /// The grammar with rules `X -> a` and `X -> a X X`, both of weight 1,
    /// whose derivation-tree counts are the Catalan numbers.
    pub fn catalan_grammar() -> Self {
        WcfgUnary::new(
            1,
            0,
            vec![
                WcfgRule::Terminal {
                    lhs: 0,
                    weight: Rat::one(),
                },
                WcfgRule::Binary {
                    lhs: 0,
                    left: 0,
                    right: 0,
                    weight: Rat::one(),
                },
            ],
        )
        .expect("stock grammar is well-formed")
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn rules(&self) -> &[WcfgRule] {
        &self.rules
    }

    /// Total weight of derivations of the length-`n` word from the start
    /// symbol. Lengths with no derivation give 0 (in particular length 0:
    /// both rule shapes consume a letter).
    pub fn eval(&self, n: u64) -> Rat {
        self.weights_by_length(n)
            .last()
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    /// Weights of the start symbol for lengths `0 ..= n`.
    pub fn weights_by_length(&self, n: u64) -> Vec<Rat> {
        let n = n as usize;
        // table[nt][len]
        let mut table = vec![vec![Rat::zero(); n + 1]; self.nonterminals];
        for len in 1..=n {
            for rule in &self.rules {
                match rule {
                    WcfgRule::Terminal { lhs, weight } => {
                        if len == 1 {
                            table[*lhs][1] = &table[*lhs][1] + weight;
                        }
                    }
                    WcfgRule::Binary {
                        lhs,
                        left,
                        right,
                        weight,
                    } => {
                        let mut acc = Rat::zero();
                        for l1 in 0..len {
                            let l2 = len - 1 - l1;
                            let prod = &table[*left][l1] * &table[*right][l2];
                            if !prod.is_zero() {
                                acc += prod * weight;
                            }
                        }
                        if !acc.is_zero() {
                            table[*lhs][len] = &table[*lhs][len] + &acc;
                        }
                    }
                }
            }
        }
        table.swap_remove(self.start)
    }

    /// The `n`-th entry of the derivation-count sequence as read through the
    /// odd lengths: with the stock rules every tree with `m` binary nodes
    /// yields `2m + 1` letters, so index `n` lives at length `2n + 1`.
    pub fn catalan_view(&self, n: u64) -> Rat {
        self.eval(2 * n + 1)
    }
}

/// Expression of the variable-free quantifier fragment: rational constants,
/// sum and product, and positionwise sum/product quantifiers. Atoms carry no
/// position variables, so over the unary alphabet a quantifier body has one
/// value `v` per length and the quantifiers evaluate to `n * v` and `v^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WmsoExpr {
    Const(Rat),
    Add(Box<WmsoExpr>, Box<WmsoExpr>),
    Mul(Box<WmsoExpr>, Box<WmsoExpr>),
    SumOver { var: String, body: Box<WmsoExpr> },
    ProdOver { var: String, body: Box<WmsoExpr> },
}

impl WmsoExpr {
    /// Reject rebinding a variable name that is already in scope.
    pub fn validate(&self) -> Result<(), AutomataError> {
        fn walk<'a>(
            e: &'a WmsoExpr,
            scope: &mut Vec<&'a str>,
        ) -> Result<(), AutomataError> {
            match e {
                WmsoExpr::Const(_) => Ok(()),
                WmsoExpr::Add(a, b) | WmsoExpr::Mul(a, b) => {
                    walk(a, scope)?;
                    walk(b, scope)
                }
                WmsoExpr::SumOver { var, body } | WmsoExpr::ProdOver { var, body } => {
                    if scope.iter().any(|v| *v == var) {
                        return Err(AutomataError::DuplicateBinding(var.clone()));
                    }
                    scope.push(var);
                    let r = walk(body, scope);
                    scope.pop();
                    r
                }
            }
        }
        walk(self, &mut Vec::new())
    }

    /// Value on the word of length `n`. The empty word collapses sums to 0
    /// and products to 1.
    pub fn eval(&self, n: u64) -> Rat {
        match self {
            WmsoExpr::Const(c) => c.clone(),
            WmsoExpr::Add(a, b) => a.eval(n) + b.eval(n),
            WmsoExpr::Mul(a, b) => a.eval(n) * b.eval(n),
            WmsoExpr::SumOver { body, .. } => {
                Rat::from(num_bigint::BigInt::from(n)) * body.eval(n)
            }
            WmsoExpr::ProdOver { body, .. } => {
                let v = body.eval(n);
                rat_pow(&v, u32::try_from(n).expect("length fits u32"))
            }
        }
    }
}

impl SequenceOracle for UnaryWeightedAutomaton {
    fn value(&self, n: u64) -> Result<Rat, EngineError> {
        Ok(self.eval(n))
    }
}

impl SequenceOracle for WcfgUnary {
    fn value(&self, n: u64) -> Result<Rat, EngineError> {
        Ok(self.eval(n))
    }

    fn prefix(&self, len: u64) -> Result<Vec<Rat>, EngineError> {
        if len == 0 {
            return Ok(vec![]);
        }
        Ok(self.weights_by_length(len - 1))
    }
}

impl SequenceOracle for WmsoExpr {
    fn value(&self, n: u64) -> Result<Rat, EngineError> {
        Ok(self.eval(n))
    }
}
