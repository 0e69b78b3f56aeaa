use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, Context};
use coium::oracle::audit_prune_losses;
use coium::{
    compare, enumerate_all, generate, load_database, Database, KulcMode, LoadOptions,
    MinUtil, MiningParams, OracleCaps, PeakMemory, OracleError, SynthSpec,
};

use crate::memory::MemoryProbe;
use crate::report::{median, stats_block, table, BenchRow};
use crate::{BenchArgs, GenArgs, MineArgs, Thresholds, VerifyArgs};

/// Exit code 1 is reserved for a non-empty verify diff.
pub const USAGE: u8 = 2;
pub const ORACLE_REFUSED: u8 = 3;

pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: USAGE, error }
    }
}

type CmdResult = Result<u8, Failure>;

fn load(path: &Path) -> anyhow::Result<Database> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    load_database(BufReader::new(file), &LoadOptions::default())
        .with_context(|| format!("cannot load {}", path.display()))
}

fn min_util(value: f64, absolute: bool) -> anyhow::Result<MinUtil> {
    if !absolute {
        return Ok(MinUtil::Relative(value));
    }
    if value < 0.0 || value.fract() != 0.0 || !value.is_finite() {
        return Err(anyhow!("absolute min-util must be a non-negative integer, got {value}"));
    }
    Ok(MinUtil::Absolute(value as u64))
}

fn params(t: &Thresholds, kulc_mode: KulcMode, max_len: Option<usize>) -> anyhow::Result<MiningParams> {
    let p = MiningParams {
        min_util: min_util(t.min_util, t.absolute)?,
        ..MiningParams::new(0.0, t.min_cor)
    }
    .with_kulc_mode(kulc_mode)
    .with_max_length(max_len);
    p.validate()?;
    Ok(p)
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn mine(args: MineArgs) -> CmdResult {
    let p = params(&args.t, args.kulc_mode, args.max_len)?.with_bounds_mode(args.bounds);
    let db = load(&args.t.input)?;

    let probe = MemoryProbe::start();
    let mut out = coium::mine(&db, &p).map_err(anyhow::Error::from)?;
    out.stats.peak_memory = probe.finish();

    let mut sink: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(create(path)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    for rec in &out.records {
        writeln!(sink, "{}", rec.to_output_line()).map_err(anyhow::Error::from)?;
    }
    sink.flush().map_err(anyhow::Error::from)?;

    if let Some(path) = &args.stats {
        let mut f = create(path)?;
        f.write_all(stats_block(&out.stats).as_bytes())
            .and_then(|_| f.flush())
            .map_err(anyhow::Error::from)?;
    }
    Ok(0)
}

pub fn verify(args: VerifyArgs) -> CmdResult {
    let p = params(&args.t, args.kulc_mode, args.max_len)?;
    let db = load(&args.t.input)?;
    let caps = OracleCaps {
        max_items: args.max_items,
        max_length: args.max_len,
    };
    let oracle = enumerate_all(&db, &p, caps).map_err(|e @ OracleError::TooLarge { .. }| Failure {
        code: ORACLE_REFUSED,
        error: anyhow!(e).context("oracle refused; lower the item count or pass --max-len"),
    })?;
    let mined = coium::mine(&db, &p).map_err(anyhow::Error::from)?;

    println!(
        "miner: {} patterns ({} mode); oracle: {} patterns from {} itemsets",
        mined.records.len(),
        p.kulc_mode,
        oracle.records.len(),
        oracle.enumerated
    );
    let diff = compare(&mined.records, &oracle.records);
    if diff.is_empty() {
        println!("no differences");
        return Ok(0);
    }

    if p.kulc_mode == KulcMode::Prune && diff.spurious.is_empty() && diff.mismatches.is_empty() {
        let losses = audit_prune_losses(&db, p.min_cor, &mined.records, &oracle.records);
        if losses.iter().all(|l| l.is_explained()) {
            for l in &losses {
                let (prefix, k) = l.blocking_prefix.as_ref().expect("explained");
                let prefix: Vec<String> = prefix.iter().map(|i| i.to_string()).collect();
                println!(
                    "kulc pruning loss: {} #KULC: {:.4} cut at prefix [{}] with Kulc {:.4} < {}",
                    l.itemset,
                    l.kulc,
                    prefix.join(" "),
                    k,
                    p.min_cor
                );
            }
            println!("{} patterns lost to Kulc pruning, no other differences", losses.len());
            return Ok(1);
        }
    }
    for line in diff.lines() {
        println!("{line}");
    }
    Ok(1)
}

pub fn bench(args: BenchArgs) -> CmdResult {
    let dataset = args
        .input
        .file_name()
        .map(|n| n.to_string_lossy().split_whitespace().collect::<Vec<_>>().join("_"))
        .unwrap_or_else(|| "input".into());
    let mut grid = Vec::new();
    for &u in &args.min_util_list {
        for &c in &args.min_cor_list {
            for &mode in &args.modes {
                let t = Thresholds {
                    input: args.input.clone(),
                    min_util: u,
                    min_cor: c,
                    absolute: false,
                };
                grid.push((u, c, params(&t, args.kulc_mode, None)?.with_bounds_mode(mode)));
            }
        }
    }
    let db = load(&args.input)?;

    let mut rows = Vec::with_capacity(grid.len());
    for (u, c, p) in grid {
        let mut times = Vec::new();
        let mut peak: Option<PeakMemory> = None;
        let mut last = None;
        for _ in 0..args.repeat {
            let probe = MemoryProbe::start();
            let out = coium::mine(&db, &p).map_err(anyhow::Error::from)?;
            let mem = probe.finish();
            times.push(out.stats.wall_time);
            peak = match (peak, mem) {
                (Some(a), Some(b)) => Some(if b.bytes > a.bytes { b } else { a }),
                (a, b) => a.or(b),
            };
            last = Some(out.stats);
        }
        let stats = last.expect("repeat >= 1");
        rows.push(BenchRow {
            dataset: dataset.clone(),
            min_util: u,
            min_cor: c,
            bounds_mode: p.bounds_mode,
            kulc_mode: p.kulc_mode,
            candidates: stats.candidates,
            patterns: stats.patterns,
            wall_time: median(times),
            peak_memory: peak,
        });
    }

    print!("{}", table(&rows));
    if let Some(path) = &args.report {
        let mut f = create(path)?;
        for row in &rows {
            writeln!(f, "{}", row.to_record()).map_err(anyhow::Error::from)?;
        }
        f.flush().map_err(anyhow::Error::from)?;
    }
    Ok(0)
}

pub fn gen(args: GenArgs) -> CmdResult {
    let spec = SynthSpec {
        max_per_item_utility: args.max_item_utility,
        ..SynthSpec::new(args.trans, args.items, args.avg_len, args.seed).with_profile(args.profile)
    };
    let db = generate(&spec).map_err(anyhow::Error::from)?;
    let mut f = create(&args.out)?;
    db.write_spmf(&mut f)
        .and_then(|_| f.flush())
        .map_err(anyhow::Error::from)?;
    Ok(0)
}
