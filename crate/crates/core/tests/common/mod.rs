//! Oracles shared by several integration test targets.

use std::collections::BTreeMap;

/// Clebsch-Gordan coefficients `⟨j1 m1 j2 m2|J M⟩` built by lowering from the
/// stretched state and orthogonalizing, with the Condon-Shortley phase
/// `⟨j1 j1 j2 (J − j1)|J J⟩ > 0`. Everything in doubled units.
pub struct Coupled {
    /// `(tJ, tM) → {tm1 → coefficient}`
    states: BTreeMap<(i32, i32), BTreeMap<i32, f64>>,
}

fn lowering(tj: i32, tm: i32) -> f64 {
    let (j, m) = (tj as f64 / 2.0, tm as f64 / 2.0);
    (j * (j + 1.0) - m * (m - 1.0)).sqrt()
}

impl Coupled {
    pub fn new(tj1: i32, tj2: i32) -> Self {
        let mut states: BTreeMap<(i32, i32), BTreeMap<i32, f64>> = BTreeMap::new();
        let mut tj = tj1 + tj2;
        while tj >= (tj1 - tj2).abs() {
            // Highest-weight state of this multiplet.
            let mut top: BTreeMap<i32, f64> = BTreeMap::new();
            if tj == tj1 + tj2 {
                top.insert(tj1, 1.0);
            } else {
                let mut tm1 = tj1;
                while tm1 >= -tj1 {
                    let tm2 = tj - tm1;
                    if tm2.abs() <= tj2 {
                        top.insert(tm1, 0.0);
                    }
                    tm1 -= 2;
                }
                // Gram-Schmidt against the higher multiplets at this M, seeded so
                // the largest-m1 component dominates.
                let keys: Vec<i32> = top.keys().copied().collect();
                let mut best = None;
                for &seed in keys.iter().rev() {
                    let mut v: BTreeMap<i32, f64> = keys.iter().map(|&k| (k, if k == seed { 1.0 } else { 0.0 })).collect();
                    let mut tjh = tj + 2;
                    while tjh <= tj1 + tj2 {
                        let u = &states[&(tjh, tj)];
                        let dot: f64 = u.iter().map(|(k, x)| x * v.get(k).copied().unwrap_or(0.0)).sum();
                        for (k, x) in u {
                            *v.get_mut(k).unwrap() -= dot * x;
                        }
                        tjh += 2;
                    }
                    let n: f64 = v.values().map(|x| x * x).sum::<f64>().sqrt();
                    if n > 1e-8 {
                        for x in v.values_mut() {
                            *x /= n;
                        }
                        best = Some(v);
                        break;
                    }
                }
                top = best.expect("orthogonal complement is empty");
                if top[&tj1] < 0.0 {
                    for x in top.values_mut() {
                        *x = -*x;
                    }
                }
            }
            states.insert((tj, tj), top.clone());
            // Lower through the multiplet with J₋ = J₁₋ + J₂₋.
            let mut cur = top;
            let mut tm = tj;
            while tm > -tj {
                let mut next: BTreeMap<i32, f64> = BTreeMap::new();
                for (&tm1, &c) in &cur {
                    let tm2 = tm - tm1;
                    if tm1 > -tj1 {
                        *next.entry(tm1 - 2).or_insert(0.0) += c * lowering(tj1, tm1);
                    }
                    if tm2 > -tj2 {
                        *next.entry(tm1).or_insert(0.0) += c * lowering(tj2, tm2);
                    }
                }
                let norm = lowering(tj, tm);
                for x in next.values_mut() {
                    *x /= norm;
                }
                tm -= 2;
                states.insert((tj, tm), next.clone());
                cur = next;
            }
            tj -= 2;
        }
        Self { states }
    }

    pub fn cg(&self, tm1: i32, tj: i32, tm: i32) -> f64 {
        self.states.get(&(tj, tm)).and_then(|s| s.get(&tm1)).copied().unwrap_or(0.0)
    }
}

/// `(j1 j2 j3; m1 m2 m3) = (−1)^{j1−j2−m3} ⟨j1 m1 j2 m2|j3 −m3⟩ / √(2j3+1)`.
pub fn three_j_oracle(c: &Coupled, tj1: i32, tj2: i32, tj3: i32, tm1: i32, tm2: i32, tm3: i32) -> f64 {
    if tm1 + tm2 + tm3 != 0 {
        return 0.0;
    }
    let e = (tj1 - tj2 - tm3) / 2;
    let phase = if e.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * c.cg(tm1, tj3, -tm3) / ((tj3 + 1) as f64).sqrt()
}
