/// Indices (1-based) where the greedy scan found a value `≤ α` (downs) and
/// then a later value `≥ β` (ups). Interleaved: `d_1 < u_1 < d_2 < u_2 < …`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Crossings {
    pub downs: Vec<usize>,
    pub ups: Vec<usize>,
}

impl Crossings {
    pub fn count(&self) -> usize {
        self.ups.len()
    }
}

pub fn crossings<T: PartialOrd>(values: &[T], alpha: &T, beta: &T) -> Crossings {
    let mut out = Crossings::default();
    let mut seeking_down = true;
    for (i, v) in values.iter().enumerate() {
        if seeking_down {
            if v <= alpha {
                out.downs.push(i + 1);
                seeking_down = false;
            }
        } else if v >= beta {
            out.ups.push(i + 1);
            seeking_down = true;
        }
    }
    out
}

/// The largest `N` with `n_1 < … < n_{2N}`, `a_{n_odd} ≤ α`, `a_{n_even} ≥ β`.
pub fn count_fluctuations<T: PartialOrd>(values: &[T], alpha: &T, beta: &T) -> usize {
    let mut n = 0;
    let mut seeking_down = true;
    for v in values {
        if seeking_down {
            if v <= alpha {
                seeking_down = false;
            }
        } else if v >= beta {
            n += 1;
            seeking_down = true;
        }
    }
    n
}
