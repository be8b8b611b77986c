use rug::{Float, Integer};

use super::IndependenceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    /// `I_n` with the column of scaled ordinates of Γ′.
    Lambda0,
    /// `I_{n+1}` with the column extended by one extra ordinate γ*.
    LambdaI,
}

/// Basis vectors as rows of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    pub kind: LatticeKind,
    pub b_bits: u32,
    pub star_index: Option<usize>,
    pub rows: Vec<Vec<Integer>>,
}

impl LatticeBasis {
    /// Number of basis vectors.
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Length of each basis vector.
    pub fn ambient(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Largest bit length of any entry.
    pub fn max_entry_bits(&self) -> u32 {
        self.rows.iter().flatten().map(|x| x.significant_bits()).max().unwrap_or(0)
    }
}

/// `⌊2^b γ⌉`, ties to even. Shifting by `b` is exact.
pub fn scaled_round(gamma: &Float, b_bits: u32) -> Integer {
    let shifted = Float::with_val(gamma.prec(), gamma << b_bits);
    shifted.to_integer().expect("finite ordinate")
}

/// Rows `e_i ⊕ ⌊2^b γ_i⌉`, one per ordinate of Γ′ followed by γ* when
/// given. `correct_bits` is the guaranteed mantissa precision of the
/// inputs (`None` when they are exact); each input must carry at least
/// `b + 10` correct bits after the binary point.
pub fn build_lattice(
    gammas: &[Float],
    gamma_star: Option<&Float>,
    b_bits: u32,
    correct_bits: Option<u32>,
) -> Result<LatticeBasis, IndependenceError> {
    if gammas.is_empty() {
        return Err(IndependenceError::Parameter("Γ′ is empty".into()));
    }
    let all: Vec<&Float> = gammas.iter().chain(gamma_star).collect();
    for (i, g) in all.iter().enumerate() {
        if !g.is_finite() || *g <= &0 {
            return Err(IndependenceError::Parameter(format!("ordinate {i} is not a positive real")));
        }
        if all[..i].iter().any(|h| h == g) {
            return Err(IndependenceError::Parameter(format!("ordinate {i} is repeated")));
        }
        if let Some(bits) = correct_bits {
            // bits left of the point plus b bits plus 10 guard bits
            let need = g.get_exp().unwrap_or(0).max(0) as u32 + b_bits + 10;
            if bits < need || g.prec() < need {
                return Err(IndependenceError::Precision { have: bits.min(g.prec()), need });
            }
        }
    }
    let width = all.len() + 1;
    let rows = all
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut row = vec![Integer::new(); width];
            row[i] = Integer::from(1);
            row[width - 1] = scaled_round(g, b_bits);
            row
        })
        .collect();
    let kind = if gamma_star.is_some() { LatticeKind::LambdaI } else { LatticeKind::Lambda0 };
    Ok(LatticeBasis { kind, b_bits, star_index: None, rows })
}
