//! Stats blocks and bench reports. Everything is `key=value`, one record per
//! line for bench rows; wall times are in seconds.

use std::fmt::Write as _;
use std::time::Duration;

use coium::{BoundsMode, KulcMode, MiningStats, PeakMemory};

pub fn secs(d: Duration) -> String {
    format!("{:.6}", d.as_secs_f64())
}

fn memory_fields(peak: &Option<PeakMemory>, out: &mut Vec<(&'static str, String)>) {
    if let Some(p) = peak {
        out.push(("peak_memory", p.bytes.to_string()));
        out.push(("peak_memory_source", p.source.clone()));
    }
}

pub fn stats_block(stats: &MiningStats) -> String {
    let mut fields = vec![
        ("candidates", stats.candidates.to_string()),
        ("patterns", stats.patterns.to_string()),
        ("nodes_pruned_by_kulc", stats.nodes_pruned_by_kulc.to_string()),
        ("wall_time", secs(stats.wall_time)),
        ("threshold", stats.threshold.to_string()),
    ];
    memory_fields(&stats.peak_memory, &mut fields);
    fields.iter().fold(String::new(), |mut s, (k, v)| {
        let _ = writeln!(s, "{k}={v}");
        s
    })
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub dataset: String,
    pub min_util: f64,
    pub min_cor: f64,
    pub bounds_mode: BoundsMode,
    pub kulc_mode: KulcMode,
    pub candidates: u64,
    pub patterns: u64,
    pub wall_time: Duration,
    pub peak_memory: Option<PeakMemory>,
}

impl BenchRow {
    fn fields(&self) -> Vec<(&'static str, String)> {
        let mut f = vec![
            ("dataset", self.dataset.clone()),
            ("min_util", self.min_util.to_string()),
            ("min_cor", self.min_cor.to_string()),
            ("bounds_mode", self.bounds_mode.to_string()),
            ("kulc_mode", self.kulc_mode.to_string()),
            ("candidates", self.candidates.to_string()),
            ("patterns", self.patterns.to_string()),
            ("wall_time", secs(self.wall_time)),
        ];
        memory_fields(&self.peak_memory, &mut f);
        f
    }

    pub fn to_record(&self) -> String {
        self.fields()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Columns padded to the widest cell. The memory source goes into the header.
pub fn table(rows: &[BenchRow]) -> String {
    let source = rows.iter().find_map(|r| r.peak_memory.as_ref()).map(|p| p.source.clone());
    let mut header = vec![
        "dataset".to_string(),
        "min_util".into(),
        "min_cor".into(),
        "bounds".into(),
        "kulc".into(),
        "candidates".into(),
        "patterns".into(),
        "wall_time(s)".into(),
    ];
    if let Some(s) = &source {
        header.push(format!("peak_memory({s})"));
    }
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut cells = vec![
                r.dataset.clone(),
                r.min_util.to_string(),
                r.min_cor.to_string(),
                r.bounds_mode.to_string(),
                r.kulc_mode.to_string(),
                r.candidates.to_string(),
                r.patterns.to_string(),
                secs(r.wall_time),
            ];
            if source.is_some() {
                cells.push(r.peak_memory.as_ref().map_or("-".into(), |p| p.bytes.to_string()));
            }
            cells
        })
        .collect();

    let widths: Vec<usize> = (0..header.len())
        .map(|c| body.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for line in std::iter::once(&header).chain(&body) {
        let cells: Vec<String> = line
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (cell, w))| if c < 5 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}

pub fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        let ms = |v: &[u64]| v.iter().map(|&x| Duration::from_millis(x)).collect::<Vec<_>>();
        assert_eq!(median(ms(&[30, 10, 20])), Duration::from_millis(20));
        assert_eq!(median(ms(&[40, 10, 20, 30])), Duration::from_millis(25));
    }

    #[test]
    fn stats_block_omits_unmeasured_memory() {
        let stats = MiningStats { candidates: 3, patterns: 2, ..Default::default() };
        let block = stats_block(&stats);
        assert!(block.contains("candidates=3\n"));
        assert!(block.contains("wall_time=0.000000\n"));
        assert!(!block.contains("peak_memory"));
    }

    #[test]
    fn table_aligns_columns() {
        let row = |u: f64, c: u64| BenchRow {
            dataset: "db.txt".into(),
            min_util: u,
            min_cor: 0.3,
            bounds_mode: BoundsMode::LuSu,
            kulc_mode: KulcMode::Prune,
            candidates: c,
            patterns: 1,
            wall_time: Duration::ZERO,
            peak_memory: None,
        };
        let t = table(&[row(0.1, 5), row(0.25, 12345)]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines.iter().all(|l| l.len() == lines[0].len()), "{t}");
        assert!(lines[2].ends_with("0.000000"));
        assert!(row(0.1, 5).to_record().starts_with("dataset=db.txt min_util=0.1 min_cor=0.3 bounds_mode=lu-su"));
    }
}
