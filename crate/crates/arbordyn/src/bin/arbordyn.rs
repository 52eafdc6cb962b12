//! Command-line front end: dimensions, densities, detectors, embeddings,
//! chain inspection, return-time structure, exhaustive sweeps, and the
//! verification suites.

use arbordyn::cp::{build_cp_chain, empirical_distribution, FiniteStateMarkovTree};
use arbordyn::detect::{build_phi, evaluate, evaluate_at_root, PhiVariant};
use arbordyn::embed::{appears_at, generic_params, GenericMode};
use arbordyn::geometry::{
    banach_density_witness, hausdorff_dim, markov_dim, minkowski_dim, upper_density,
    DensityEvalMode, DensityValue, DimMode, VertexPredicate,
};
use arbordyn::rational::{parse_rat, rat, rat_string, Rat};
use arbordyn::returns::{
    correlation, kneser_cyclic, kneser_min_period, return_set, return_set_delta,
    return_set_gamma, return_set_m_delta, sweep_kneser, sweep_sum_closure, sweep_mean_ergodic,
    sweep_shift_partition, transfer_set, verify_thm_partition, FiniteMPS,
};
use arbordyn::treespec::{
    make_configuration, make_named_tree, parse_set_shorthand, ConfigKind, Configuration,
    NamedFamily, TreeSpec, TreeSpecJson,
};
use arbordyn::{arith, verify, Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::Path;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "arbordyn", version, about = "Finite-state trees: dimensions, embeddings, detectors, and return times")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Seed for randomized checks; fixed default for reproducibility.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Upper,
    Banach,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    Phi,
    PhiPrime,
    Varphi,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minkowski or Hausdorff dimension of a tree.
    Dim {
        /// Tree: a JSON file path or shorthand like "kN:2,2,3", "eps:2,2,2,4", "full:2".
        #[arg(long)]
        tree: String,
        /// Exact closed form (profiles and strongly connected automata).
        #[arg(long)]
        exact: bool,
        /// Estimate depth for level-count mode.
        #[arg(long, default_value_t = 60)]
        depth: usize,
        /// Bracket the Hausdorff dimension instead.
        #[arg(long)]
        hausdorff: bool,
        #[arg(long, default_value_t = 60)]
        horizon: usize,
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        cut_floor: usize,
    },
    /// Vertex density of a level set, with optional witness evaluation.
    Density {
        #[arg(long)]
        tree: String,
        /// Level set shorthand, e.g. "3N" or "2N\8N".
        #[arg(long)]
        levels: String,
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 60)]
        depth: usize,
        /// Base vertices for the Banach witness, comma-separated words like "0,01,010" ("-" for the root).
        #[arg(long)]
        witness: Option<String>,
        /// Window length for the witness average.
        #[arg(long, default_value_t = 29)]
        window: usize,
    },
    /// Detector value at the root: does the configuration appear with parameter m?
    Detect {
        #[arg(long)]
        tree: String,
        /// Configuration shorthand: "F2", "D2,2", "V2,3,3".
        #[arg(long)]
        config: String,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = Variant::Phi)]
        variant: Variant,
        /// Splitting threshold delta as "p/q".
        #[arg(long)]
        delta: Option<String>,
    },
    /// Generic parameters of a configuration in a tree.
    Generic {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        config: String,
        #[arg(long)]
        mmax: usize,
        #[arg(long, value_enum, default_value_t = Mode::Upper)]
        mode: Mode,
        /// Search depth for non-profile trees.
        #[arg(long, default_value_t = 40)]
        depth: usize,
    },
    /// Chain built from the uniform Markov tree: states, stationary law, entropy.
    Cp {
        #[arg(long)]
        tree: String,
        /// Also report the stationary measure of r-fold splitting.
        #[arg(long)]
        r: Option<u8>,
        #[arg(long, default_value_t = 30)]
        horizon: usize,
    },
    /// Detector state function, listed per chain state.
    Phi {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        config: String,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = Variant::Phi)]
        variant: Variant,
        #[arg(long)]
        delta: Option<String>,
    },
    /// Return-time sets of a finite measure-preserving system.
    Returns {
        /// Rotation on Z/n.
        #[arg(long)]
        n: Option<usize>,
        /// Permutation kind; only "rot" with --n, or use --cycles.
        #[arg(long, default_value = "rot")]
        perm: String,
        /// Disjoint cycle lengths with uniform measure, e.g. "3,2".
        #[arg(long)]
        cycles: Option<String>,
        /// The set A as comma-separated points, e.g. "0,3".
        #[arg(long = "A")]
        a: String,
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        gamma: Option<String>,
        /// Lag m for the double-return set (needs --delta).
        #[arg(long)]
        m: Option<usize>,
        /// Threshold for the transfer set to B (needs --B).
        #[arg(long)]
        eps: Option<String>,
        #[arg(long = "B")]
        b: Option<String>,
        /// Run the inverse-theorem partition checks.
        #[arg(long)]
        thm: bool,
        /// Report the Kneser structure of R.
        #[arg(long)]
        kneser: bool,
    },
    /// Exhaustive sweeps over small systems.
    Sweep {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 8)]
        max: usize,
    },
    /// Verification suites; exit code 1 if any assertion fails.
    Verify {
        suite: String,
    },
}

/// Either a path to a tree-spec JSON file or family shorthand:
/// "kN:q,r,k", "eps:q,r,k,N", "full:q", "E:q,r,<set>".
fn parse_tree(s: &str) -> Result<TreeSpec> {
    if Path::new(s).exists() {
        let text = std::fs::read_to_string(s)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {s}: {e}")))?;
        return TreeSpecJson::parse(&text)?.to_spec();
    }
    let bad = || Error::InvalidParameter(format!("unrecognized tree {s:?}; expected a JSON file or \"kN:q,r,k\", \"eps:q,r,k,N\", \"full:q\", \"E:q,r,<set>\""));
    let (head, rest) = s.split_once(':').ok_or_else(bad)?;
    let profile = match head {
        "full" => {
            let q: u8 = rest.trim().parse().map_err(|_| bad())?;
            make_named_tree(NamedFamily::Multiples { k: 1 }, q, q)?
        }
        "kN" => {
            let nums: Vec<usize> = rest
                .split(',')
                .map(|p| p.trim().parse().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            let [q, r, k] = nums[..] else { return Err(bad()) };
            make_named_tree(NamedFamily::Multiples { k }, q as u8, r as u8)?
        }
        "eps" => {
            let nums: Vec<usize> = rest
                .split(',')
                .map(|p| p.trim().parse().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            let [q, r, k, big_n] = nums[..] else { return Err(bad()) };
            make_named_tree(NamedFamily::Eps { k, big_n }, q as u8, r as u8)?
        }
        "E" => {
            let parts: Vec<&str> = rest.splitn(3, ',').collect();
            let [q, r, set] = parts[..] else { return Err(bad()) };
            let q: u8 = q.trim().parse().map_err(|_| bad())?;
            let r: u8 = r.trim().parse().map_err(|_| bad())?;
            make_named_tree(NamedFamily::E(parse_set_shorthand(set)?), q, r)?
        }
        _ => return Err(bad()),
    };
    Ok(TreeSpec::Profile(profile))
}

fn parse_config(s: &str, q: u8) -> Result<Configuration> {
    make_configuration(ConfigKind::parse(s)?, q)
}

fn parse_rat_arg(s: &str) -> Result<Rat> {
    parse_rat(s).ok_or_else(|| Error::InvalidParameter(format!("bad rational {s:?}")))
}

fn parse_points(s: &str, n: usize) -> Result<Vec<bool>> {
    let mut out = vec![false; n];
    for p in s.split(',') {
        let x: usize = p
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad point {p:?}")))?;
        if x >= n {
            return Err(Error::InvalidParameter(format!("point {x} outside [0, {n})")));
        }
        out[x] = true;
    }
    Ok(out)
}

fn parse_word(s: &str) -> Result<Vec<u8>> {
    let s = s.trim();
    if s.is_empty() || s == "-" {
        return Ok(vec![]);
    }
    s.chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as u8)
                .ok_or_else(|| Error::InvalidParameter(format!("bad word {s:?}")))
        })
        .collect()
}

/// Key-value output in the selected format.
fn emit(format: Format, pairs: &[(String, String)]) {
    match format {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = pairs
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                .collect();
            println!("{}", serde_json::to_string_pretty(&map).unwrap());
        }
        Format::Csv => {
            println!("key,value");
            for (k, v) in pairs {
                println!("{k},{}", v.replace(',', ";"));
            }
        }
        Format::Table => {
            for (k, v) in pairs {
                println!("{k} = {v}");
            }
        }
    }
}

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn uniform_tau(tree: &TreeSpec) -> Result<FiniteStateMarkovTree> {
    Ok(FiniteStateMarkovTree::uniform(tree.automaton()?))
}

fn variant_of(v: Variant) -> PhiVariant {
    match v {
        Variant::Phi => PhiVariant::Phi,
        Variant::PhiPrime => PhiVariant::PhiPrime,
        Variant::Varphi => PhiVariant::Varphi,
    }
}

/// Exact rational rendering of a profile dimension when every splitting
/// value is 1 or q, so the log average is a ratio of integers.
fn rational_dim(tree: &TreeSpec) -> Option<Rat> {
    let TreeSpec::Profile(t) = tree else { return None };
    let q = t.q();
    let per = t.splitting().period();
    if t.splitting().preperiod().iter().chain(per).any(|&s| s != 1 && s != q) {
        return None;
    }
    let hits = per.iter().filter(|&&s| s == q).count();
    Some(rat(hits as i64, per.len() as i64))
}

fn run(cli: Cli) -> Result<bool> {
    let format = cli.format;
    match cli.cmd {
        Cmd::Dim { tree, exact, depth, hausdorff, horizon, tol, cut_floor } => {
            let t = parse_tree(&tree)?;
            if hausdorff {
                let h = hausdorff_dim(&t, cut_floor, horizon, tol)?;
                let mut pairs = vec![
                    kv("lo", format!("{:.6}", h.lo)),
                    kv("hi", format!("{:.6}", h.hi)),
                    kv("tol", tol),
                ];
                if let Some(e) = h.exact {
                    pairs.push(kv("exact", format!("{e:.12}")));
                }
                emit(format, &pairs);
            } else {
                let mode = if exact { DimMode::Exact } else { DimMode::Estimate(depth) };
                let d = minkowski_dim(&t, mode)?;
                let value = match (exact, rational_dim(&t)) {
                    (true, Some(r)) => rat_string(&r),
                    _ => format!("{:.12}", d.value),
                };
                emit(
                    format,
                    &[kv("value", value), kv("mode", if d.exact { "exact" } else { "estimate" })],
                );
            }
        }
        Cmd::Density { tree, levels, exact, depth, witness, window } => {
            let t = parse_tree(&tree)?;
            let set = parse_set_shorthand(&levels)?;
            let pred = VertexPredicate::Levels(set);
            let mut pairs = Vec::new();
            if exact {
                match upper_density(&t, &pred, DensityEvalMode::Exact)? {
                    DensityValue::Exact(r) => pairs.push(kv("upper_density", rat_string(&r))),
                    DensityValue::Estimate { .. } => unreachable!("exact mode"),
                }
            } else {
                match upper_density(&t, &pred, DensityEvalMode::Estimate(depth))? {
                    DensityValue::Estimate { value, .. } => {
                        pairs.push(kv("upper_density", format!("{value:.6}")));
                        pairs.push(kv("mode", "estimate"));
                    }
                    DensityValue::Exact(r) => pairs.push(kv("upper_density", rat_string(&r))),
                }
            }
            if let Some(w) = witness {
                let tau = uniform_tau(&t)?;
                let vertices: Vec<Vec<u8>> =
                    w.split(',').map(parse_word).collect::<Result<_>>()?;
                let res = banach_density_witness(&tau, &pred, &vertices, window)?;
                pairs.push(kv("witness_value", rat_string(&res.value)));
                pairs.push(kv("witness_vertex", format!("{:?}", res.vertex)));
            }
            emit(format, &pairs);
        }
        Cmd::Detect { tree, config, m, variant, delta } => {
            let t = parse_tree(&tree)?;
            let c = parse_config(&config, t.q())?;
            if m == 0 {
                // Parameter 0 collapses the configuration onto its base
                // vertex; the embedding is the constant map.
                emit(
                    format,
                    &[
                        kv("value", "1"),
                        kv("positive", true),
                        kv("witness", "trivial: every configuration word maps to the base vertex"),
                    ],
                );
                return Ok(true);
            }
            let d = delta.map(|s| parse_rat_arg(&s)).transpose()?;
            let tau = uniform_tau(&t)?;
            let chain = build_cp_chain(&tau);
            let expr = build_phi(&c, m, variant_of(variant), d)?;
            let value = evaluate_at_root(&expr, &chain, &tau)?;
            let appears = appears_at(&t, &c, &[], m)?.is_some();
            emit(
                format,
                &[
                    kv("value", rat_string(&value)),
                    kv("positive", value > rat(0, 1)),
                    kv("appears_at_root", appears),
                ],
            );
        }
        Cmd::Generic { tree, config, mmax, mode, depth } => {
            let t = parse_tree(&tree)?;
            let c = parse_config(&config, t.q())?;
            let gm = match mode {
                Mode::Upper => GenericMode::Upper,
                Mode::Banach => GenericMode::Banach,
            };
            let gp = generic_params(&t, &c, gm, mmax, depth)?;
            emit(
                format,
                &[
                    kv("params", format!("{:?}", gp.params)),
                    kv("exact", gp.exact),
                ],
            );
        }
        Cmd::Cp { tree, r, horizon } => {
            let t = parse_tree(&tree)?;
            let tau = uniform_tau(&t)?;
            let chain = build_cp_chain(&tau);
            let mut pairs = vec![
                kv("states", chain.len()),
                kv("ergodic", chain.is_ergodic()),
                kv("entropy", format!("{:.12}", chain.entropy())),
            ];
            let st = chain
                .stationary()
                .iter()
                .map(rat_string)
                .collect::<Vec<_>>()
                .join(" ");
            pairs.push(kv("stationary", st));
            let md = markov_dim(&tau, horizon)?;
            pairs.push(kv("dim_estimate", format!("{:.6}", md.estimate)));
            if let Some(e) = md.exact {
                pairs.push(kv("dim_exact", format!("{e:.12}")));
            }
            if let Some(r) = r {
                let rep = chain.measure_of_splitting(r)?;
                pairs.push(kv(&format!("measure_A{r}"), rat_string(&rep.nu_a_r)));
            }
            let emp = empirical_distribution(&t, horizon)?;
            pairs.push(kv("empirical_entropy", format!("{:.12}", emp.entropy)));
            emit(format, &pairs);
        }
        Cmd::Phi { tree, config, m, variant, delta } => {
            let t = parse_tree(&tree)?;
            let c = parse_config(&config, t.q())?;
            let d = delta.map(|s| parse_rat_arg(&s)).transpose()?;
            let tau = uniform_tau(&t)?;
            let chain = build_cp_chain(&tau);
            let expr = build_phi(&c, m, variant_of(variant), d)?;
            let values = evaluate(&expr, &chain);
            let mut pairs: Vec<(String, String)> = values
                .iter()
                .enumerate()
                .map(|(s, v)| {
                    let st = &chain.states()[s];
                    (format!("state{}_label{}", s, st.label), rat_string(v))
                })
                .collect();
            pairs.push(kv("root", rat_string(&evaluate_at_root(&expr, &chain, &tau)?)));
            emit(format, &pairs);
        }
        Cmd::Returns { n, perm, cycles, a, delta, gamma, m, eps, b, thm, kneser } => {
            let mps = match (&cycles, n) {
                (Some(cs), _) => {
                    let lens: Vec<usize> = cs
                        .split(',')
                        .map(|p| {
                            p.trim().parse().map_err(|_| {
                                Error::InvalidParameter(format!("bad cycle length {p:?}"))
                            })
                        })
                        .collect::<Result<_>>()?;
                    FiniteMPS::from_cycle_type(&lens)?
                }
                (None, Some(n)) => {
                    if perm != "rot" {
                        return Err(Error::InvalidParameter(format!(
                            "unknown permutation {perm:?}; use \"rot\" or --cycles"
                        )));
                    }
                    FiniteMPS::rotation(n)?
                }
                (None, None) => {
                    return Err(Error::InvalidParameter("need --n or --cycles".into()))
                }
            };
            let a_set = parse_points(&a, mps.n())?;
            let r = return_set(&mps, &a_set);
            let mut pairs = vec![
                kv("nu_A", rat_string(&mps.measure(&a_set))),
                kv("R", r.describe()),
                kv("d_R", rat_string(&arith::densities(&r).upper)),
            ];
            let g = correlation(&mps, &a_set, &a_set);
            pairs.push(kv(
                "correlation",
                g.values.iter().map(rat_string).collect::<Vec<_>>().join(" "),
            ));
            if let Some(d) = &delta {
                let d = parse_rat_arg(d)?;
                let rd = return_set_delta(&mps, &a_set, &d)?;
                pairs.push(kv("R_delta", rd.describe()));
                if let Some(m) = m {
                    let rmd = return_set_m_delta(&mps, &a_set, m, &d)?;
                    pairs.push(kv(&format!("R_{m}_delta"), rmd.describe()));
                }
            }
            if let Some(gm) = &gamma {
                let gm = parse_rat_arg(gm)?;
                let rg = return_set_gamma(&mps, &a_set, &gm)?;
                pairs.push(kv("R_gamma", rg.describe()));
            }
            if let (Some(e), Some(bs)) = (&eps, &b) {
                let e = parse_rat_arg(e)?;
                let b_set = parse_points(bs, mps.n())?;
                let tr = transfer_set(&mps, &a_set, &b_set, &e)?;
                pairs.push(kv("R_transfer", tr.describe()));
            }
            if kneser {
                let (k, res) = kneser_min_period(&r)?;
                pairs.push(kv("kneser_k", k));
                pairs.push(kv("kneser_K", format!("{res:?}")));
                let ck = kneser_cyclic(k.max(1), &res)?;
                pairs.push(kv("kneser_sumset", format!("{:?}", ck.sumset)));
                pairs.push(kv("kneser_stabilizer", format!("{:?}", ck.stabilizer)));
                pairs.push(kv("kneser_bound_holds", ck.bound_holds));
            }
            if thm {
                let rep = verify_thm_partition(&mps, &a_set)?;
                pairs.push(kv("hypothesis_d_R_equals_nu", rep.hypothesis_equal));
                pairs.push(kv("shift_k", format!("{:?}", rep.k)));
                pairs.push(kv("shift_partition_ok", format!("{:?}", rep.shift_partition_ok)));
                pairs.push(kv("ergodic", rep.ergodic));
                pairs.push(kv("orbit_hypothesis", rep.orbit_hypothesis));
                pairs.push(kv("orbit_k", format!("{:?}", rep.orbit_k)));
                pairs.push(kv("orbit_partition_ok", format!("{:?}", rep.orbit_partition_ok)));
                if !rep.note.is_empty() {
                    pairs.push(kv("note", rep.note));
                }
            }
            emit(format, &pairs);
        }
        Cmd::Sweep { suite, max } => {
            let rep = match suite.as_str() {
                "shift-partition" => sweep_shift_partition(max)?,
                "kneser" => sweep_kneser(max)?,
                "sum-closure" => sweep_sum_closure(max)?,
                "mean-ergodic" => sweep_mean_ergodic(max)?,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown sweep {other:?}; expected shift-partition | kneser | sum-closure | mean-ergodic"
                    )))
                }
            };
            let clean = rep.counterexamples.is_empty();
            emit(
                format,
                &[
                    kv("checked", rep.checked),
                    kv("counterexamples", rep.counterexamples.len()),
                    kv("first", rep.counterexamples.first().cloned().unwrap_or_default()),
                ],
            );
            return Ok(clean);
        }
        Cmd::Verify { suite } => {
            let rep = verify::run_suite(&suite, cli.seed)?;
            match format {
                Format::Json => println!("{}", rep.to_json()),
                _ => print!("{}", rep.to_table()),
            }
            return Ok(rep.passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
