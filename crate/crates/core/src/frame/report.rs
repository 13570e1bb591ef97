use std::fmt;

use serde::Serialize;

use crate::group::Elem;

/// A single named condition from one of the condition families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Condition {
    /// Group frame conditions (i)-(iv).
    Frame(u8),
    /// Pre-semi-frame conditions (i)-(iii) and the semi-frame condition (iv).
    SemiFrame(u8),
    /// Coset conditions (i)-(iv).
    Coset(u8),
    /// The ordered, simplified conditions (i)-(ix).
    Simplified(u8),
    /// `H_xy H_xz H_xw = G_x` over quadruples of distinct indices.
    TripleProduct,
    /// Hypothesis of the single-coset corollary: every coset not associated
    /// with `C_pqr` is an identity coset.
    SingleCosetHypothesis,
    /// Conditions (i)-(iv) of the single-coset corollary.
    SingleCoset(u8),
}

pub(crate) fn roman(n: u8) -> &'static str {
    const R: [&str; 10] = ["0", "i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix"];
    R.get(n as usize).copied().unwrap_or("?")
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Condition::Frame(n) => write!(f, "frame condition ({})", roman(n)),
            Condition::SemiFrame(n) => write!(f, "semi-frame condition ({})", roman(n)),
            Condition::Coset(n) => write!(f, "coset condition ({})", roman(n)),
            Condition::Simplified(n) => write!(f, "simplified condition ({})", roman(n)),
            Condition::TripleProduct => write!(f, "triple-product condition"),
            Condition::SingleCosetHypothesis => write!(f, "single-coset hypothesis"),
            Condition::SingleCoset(n) => write!(f, "single-coset condition ({})", roman(n)),
        }
    }
}

/// Two sets that should have been equal (or the left one contained in the right).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub note: String,
    pub lhs: Vec<Elem>,
    pub rhs: Vec<Elem>,
}

impl Witness {
    pub fn new(note: impl Into<String>, lhs: Vec<Elem>, rhs: Vec<Elem>) -> Self {
        Self { note: note.into(), lhs, rhs }
    }

    pub fn note(note: impl Into<String>) -> Self {
        Self { note: note.into(), lhs: Vec::new(), rhs: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub condition: Condition,
    /// Index names of the pair, triple or quadruple.
    pub instance: Vec<String>,
    pub passed: bool,
    pub witness: Option<Witness>,
}

/// Outcome of a validator: one entry per checked instance, in a fixed order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Set when a validator's precondition does not hold; the checks still run.
    pub precondition: Option<String>,
    pub entries: Vec<Entry>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, condition: Condition, instance: Vec<String>, result: Result<(), Witness>) {
        let (passed, witness) = match result {
            Ok(()) => (true, None),
            Err(w) => (false, Some(w)),
        };
        self.entries.push(Entry { condition, instance, passed, witness });
    }

    pub fn extend(&mut self, other: ValidationReport) {
        if self.precondition.is_none() {
            self.precondition = other.precondition;
        }
        self.entries.extend(other.entries);
    }

    /// All checks passed and the precondition held.
    pub fn passed(&self) -> bool {
        self.precondition.is_none() && self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    /// Did every instance of `condition` pass?
    pub fn condition_passed(&self, condition: Condition) -> bool {
        self.entries.iter().filter(|e| e.condition == condition).all(|e| e.passed)
    }

    /// Conditions with at least one failing instance, deduplicated and sorted.
    pub fn failed_conditions(&self) -> Vec<Condition> {
        let mut out: Vec<Condition> = self.failures().map(|e| e.condition).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn count(&self, condition: Condition) -> usize {
        self.entries.iter().filter(|e| e.condition == condition).count()
    }

    /// Distinct conditions in report order, each with its pass/fail tally.
    pub fn summary(&self) -> Vec<(Condition, usize, usize)> {
        let mut out: Vec<(Condition, usize, usize)> = Vec::new();
        for e in &self.entries {
            match out.iter_mut().find(|(c, _, _)| *c == e.condition) {
                Some(slot) => {
                    if e.passed {
                        slot.1 += 1
                    } else {
                        slot.2 += 1
                    }
                }
                None => out.push((e.condition, e.passed as usize, (!e.passed) as usize)),
            }
        }
        out
    }
}
