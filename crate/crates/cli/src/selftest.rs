//! Runtime check of the composition table against two independent oracles.

use std::fmt;

use num_rational::Ratio;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tdtree::inference::allen::allen_compose;
use tdtree::inference::{compare_intervals, compose, composition_table, generate_composition_table, RelationSet};
use tdtree::{CoarseRelation, Interval, RationalInterval};

pub struct Report {
    /// Cells where the generated table differs from the Allen-mapping oracle.
    pub allen_mismatches: Vec<(CoarseRelation, CoarseRelation)>,
    /// Cells where a brute-force enumeration of small intervals differs.
    pub enumeration_mismatches: Vec<(CoarseRelation, CoarseRelation)>,
    pub samples: usize,
    pub violations: usize,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.allen_mismatches.is_empty() && self.enumeration_mismatches.is_empty() && self.violations == 0
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let table = composition_table();
        write!(f, "{:<11}", "")?;
        for r in CoarseRelation::ALL {
            write!(f, " {:<41}", r.name())?;
        }
        writeln!(f)?;
        for r1 in CoarseRelation::ALL {
            write!(f, "{:<11}", r1.name())?;
            for r2 in CoarseRelation::ALL {
                write!(f, " {:<41}", table[r1.index()][r2.index()].to_string())?;
            }
            writeln!(f)?;
        }
        let status = |bad: bool| if bad { "FAIL" } else { "ok" };
        writeln!(f, "allen oracle: {} ({} cells differ)", status(!self.allen_mismatches.is_empty()), self.allen_mismatches.len())?;
        writeln!(
            f,
            "enumeration oracle: {} ({} cells differ)",
            status(!self.enumeration_mismatches.is_empty()),
            self.enumeration_mismatches.len()
        )?;
        writeln!(f, "monte carlo: {} ({} violations in {} triples)", status(self.violations > 0), self.violations, self.samples)
    }
}

fn allen_oracle(r1: CoarseRelation, r2: CoarseRelation) -> Option<RelationSet> {
    let mut out = Vec::new();
    for a in r1.allen().iter() {
        for b in r2.allen().iter() {
            out.extend(allen_compose(a, b).iter().map(CoarseRelation::from_allen));
        }
    }
    RelationSet::from_relations(out)
}

/// Every relation realized by triples of intervals with endpoints in 0..=6.
fn enumeration_oracle() -> [[Option<RelationSet>; 5]; 5] {
    let mut intervals = Vec::new();
    for s in 0..=6i64 {
        for e in s + 1..=6 {
            intervals.push(Interval::new(s, e).expect("non-empty"));
        }
    }
    let mut seen = [[None; 5]; 5];
    for a in &intervals {
        for b in &intervals {
            let ab = compare_intervals(a, b);
            for c in &intervals {
                let cell: &mut Option<RelationSet> = &mut seen[ab.index()][compare_intervals(b, c).index()];
                let ac = RelationSet::single(compare_intervals(a, c));
                *cell = Some(cell.map_or(ac, |s| s.union(ac)));
            }
        }
    }
    seen
}

fn random_interval(rng: &mut impl Rng) -> RationalInterval {
    loop {
        let mut point = || Ratio::new(rng.gen_range(-1000..=1000), rng.gen_range(1..=12));
        let (x, y) = (point(), point());
        if let Some(iv) = Interval::new(x.min(y), x.max(y)) {
            return iv;
        }
    }
}

pub fn run(samples: usize, seed: u64) -> Report {
    let generated = generate_composition_table();
    let enumerated = enumeration_oracle();
    let mut allen_mismatches = Vec::new();
    let mut enumeration_mismatches = Vec::new();
    for r1 in CoarseRelation::ALL {
        for r2 in CoarseRelation::ALL {
            let cell = Some(generated[r1.index()][r2.index()]);
            if allen_oracle(r1, r2) != cell {
                allen_mismatches.push((r1, r2));
            }
            if enumerated[r1.index()][r2.index()] != cell {
                enumeration_mismatches.push((r1, r2));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let violations = (0..samples)
        .filter(|_| {
            let (a, b, c) = (random_interval(&mut rng), random_interval(&mut rng), random_interval(&mut rng));
            !compose(compare_intervals(&a, &b), compare_intervals(&b, &c)).contains(compare_intervals(&a, &c))
        })
        .count();
    Report {
        allen_mismatches,
        enumeration_mismatches,
        samples,
        violations,
    }
}
