//! Dataset orchestration: configuration, SNR/split planning, parallel frame
//! generation and the manifest that indexes the output tree.

mod config;
mod generate;
mod manifest;

use std::fmt;
use std::str::FromStr;

pub use config::{ConfigOverrides, DatasetConfig, DEFAULT_SPLIT_RATIO};
pub use generate::{generate, ground_truth, process_frame, GenerateSummary, GroundTruth};
pub use manifest::{read_manifest, write_manifest, ManifestRow, MANIFEST_HEADER};

use crate::error::{Error, Result};
use crate::rng::frame_seed;
use crate::scene::Environment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            _ => Err(Error::Config(format!("unknown split `{s}` (expected train, val or test)"))),
        }
    }
}

/// One frame of a generation plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedFrame {
    pub index: usize,
    pub frame_id: String,
    pub split: Split,
    pub snr_db: i32,
    pub env: Environment,
    pub seed: u64,
}

pub fn frame_id(env: Environment, index: usize) -> String {
    format!("{}_{index:06}", env.tag())
}

/// Splits `n` items across `weights` by largest remainder; ties go to the
/// lower index.
pub fn apportion(n: usize, weights: &[usize]) -> Vec<usize> {
    let total: usize = weights.iter().sum();
    if total == 0 {
        return vec![0; weights.len()];
    }
    let mut counts: Vec<usize> = weights.iter().map(|&w| w * n / total).collect();
    let mut rems: Vec<(usize, usize)> = weights.iter().enumerate().map(|(i, &w)| (w * n % total, i)).collect();
    rems.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let short = n - counts.iter().sum::<usize>();
    for &(_, i) in rems.iter().take(short) {
        counts[i] += 1;
    }
    counts
}

/// Split counts for each SNR level, one row per level.
///
/// Every cell is the floor or the ceiling of its proportional share
/// `split * level / n`, rows sum to the level sizes and columns to the split
/// sizes. The leftover units after flooring are placed by a max-flow over
/// the (level, split) cells, searched in index order so the result is
/// deterministic.
pub fn split_table(level_sizes: &[usize], split_sizes: [usize; 3]) -> Vec<[usize; 3]> {
    let n: usize = split_sizes.iter().sum();
    let mut rows: Vec<[usize; 3]> = level_sizes
        .iter()
        .map(|&size| std::array::from_fn(|s| (split_sizes[s] * size).checked_div(n).unwrap_or(0)))
        .collect();
    if n == 0 {
        return rows;
    }

    // nodes: source, levels, splits, sink
    let levels = level_sizes.len();
    let (src, sink) = (0, levels + 4);
    let node_count = levels + 5;
    let mut cap = vec![vec![0usize; node_count]; node_count];
    for (l, &size) in level_sizes.iter().enumerate() {
        cap[src][1 + l] = size - rows[l].iter().sum::<usize>();
        for s in 0..3 {
            if !(split_sizes[s] * size).is_multiple_of(n) {
                cap[1 + l][1 + levels + s] = 1;
            }
        }
    }
    for s in 0..3 {
        let floor_sum: usize = rows.iter().map(|r| r[s]).sum();
        cap[1 + levels + s][sink] = split_sizes[s] - floor_sum;
    }

    loop {
        let mut prev = vec![usize::MAX; node_count];
        prev[src] = src;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for v in 0..node_count {
                if prev[v] == usize::MAX && cap[u][v] > 0 {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[sink] == usize::MAX {
            break;
        }
        let mut v = sink;
        while v != src {
            let u = prev[v];
            cap[u][v] -= 1;
            cap[v][u] += 1;
            v = u;
        }
    }

    for (l, row) in rows.iter_mut().enumerate() {
        for (s, cell) in row.iter_mut().enumerate() {
            // residual reverse capacity marks a used cell
            *cell += cap[1 + levels + s][1 + l];
        }
    }
    rows
}

/// Assigns every frame an SNR level (round robin by index), a split and a
/// seed. A pure function of the config.
pub fn plan(config: &DatasetConfig) -> Result<Vec<PlannedFrame>> {
    config.validate()?;
    let levels = config.snr_levels.len();
    let level_sizes: Vec<usize> = (0..levels)
        .map(|l| config.n_frames / levels + usize::from(l < config.n_frames % levels))
        .collect();
    let table = split_table(&level_sizes, config.split_sizes);

    let mut seen = vec![0usize; levels];
    let frames = (0..config.n_frames)
        .map(|index| {
            let level = index % levels;
            let rank = seen[level];
            seen[level] += 1;
            let row = table[level];
            let split = if rank < row[0] {
                Split::Train
            } else if rank < row[0] + row[1] {
                Split::Val
            } else {
                Split::Test
            };
            PlannedFrame {
                index,
                frame_id: frame_id(config.env, index),
                split,
                snr_db: config.snr_levels[level],
                env: config.env,
                seed: frame_seed(config.global_seed, index as u64),
            }
        })
        .collect();
    Ok(frames)
}
