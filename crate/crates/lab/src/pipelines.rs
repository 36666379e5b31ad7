//! One function per pipeline, each turning a [`RunConfig`] into named datasets.

use std::time::Instant;

use dicke_core::classical::{chaos_fraction_map, semiclassical_count, semiclassical_dos, ChaosMapSettings};
use dicke_core::entropy::{entropy_lattice, tavis_cummings_entropies, EntropyKinds, EntropyRecord};
use dicke_core::eth::{
    centered_diagonal, default_eth_window, delta_mic, delta_mic_extremal_profile, delta_mic_series,
    fit_distribution, observable_diagonal, observable_matrix, offdiagonal_elements, ObservableKind, ObservableMatrix,
};
use dicke_core::model::{EigenSolution, Parity};
use dicke_core::spectral::{consecutive_ratios, converged_levels, r_map_from_spectra};
use dicke_core::stats::variance;
use dicke_core::ModelParams;

use crate::archive::{unix_now, CacheRecord, Column, Dataset, ResultArchive, RunLog};
use crate::cache::EigenCache;
use crate::config::{Pipeline, RunConfig};
use crate::error::{LabError, Result};

/// Scaled-energy unit of every `epsilon` column.
pub const ENERGY_UNIT: &str = "E/(omega j)";

/// Lower edge of the interval used for mean spacing ratios.
pub const RATIO_FLOOR: f64 = -0.8;

struct Run<'a> {
    cfg: &'a RunConfig,
    cache: &'a EigenCache,
    archive: ResultArchive,
    log: RunLog,
}

impl<'a> Run<'a> {
    fn sector(&mut self, params: &ModelParams, parity: Parity, vectors: bool) -> Result<EigenSolution> {
        let t = Instant::now();
        let (sol, event) =
            self.cache
                .converged_sector(params, self.cfg.basis(), parity, self.cfg.convergence, vectors)?;
        self.log.cache.push(CacheRecord {
            what: format!("j={} gamma={} parity={:?} vectors={vectors}", params.j(), params.gamma(), parity),
            event,
            seconds: t.elapsed().as_secs_f64(),
        });
        Ok(sol)
    }

    fn single_sector(&self) -> Result<Parity> {
        match self.cfg.parity.sectors().as_slice() {
            [p] => Ok(*p),
            _ => Err(LabError::config(
                "parity",
                format!("pipeline `{}` works on one parity sector", self.archive.metadata.pipeline),
            )),
        }
    }

    fn timed<T>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let out = f(self)?;
        self.log.stage(stage, t.elapsed().as_secs_f64());
        Ok(out)
    }
}

fn nan_if_none(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn sector_key(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
        Parity::Unresolved => "unresolved",
    }
}

/// Runs `pipeline` and returns its archive together with the wall-clock log.
pub fn run_pipeline(pipeline: Pipeline, cfg: &RunConfig, cache: &EigenCache) -> Result<(ResultArchive, RunLog)> {
    let mut run = Run {
        cfg,
        cache,
        archive: ResultArchive::new(pipeline.name(), cfg),
        log: RunLog {
            started_unix: unix_now(),
            threads: rayon::current_num_threads(),
            ..RunLog::default()
        },
    };
    if pipeline != Pipeline::ChaosMap {
        run.archive.resolve("basis", cfg.basis());
        run.archive.resolve("tolerances", cfg.convergence);
        run.archive.resolve("parity", cfg.parity);
    }
    match pipeline {
        Pipeline::Spectrum => run.timed("spectrum", spectrum)?,
        Pipeline::ChaosMap => run.timed("chaos-map", chaos_map)?,
        Pipeline::RMap => run.timed("r-map", r_map)?,
        Pipeline::Peres => run.timed("peres", peres)?,
        Pipeline::EthStats => run.timed("eth-stats", eth_stats)?,
        Pipeline::Entropy => run.timed("entropy", entropy)?,
        Pipeline::TcCompare => run.timed("tc-compare", tc_compare)?,
        Pipeline::Dos => run.timed("dos", dos)?,
    }
    run.log.finished_unix = unix_now();
    Ok((run.archive, run.log))
}

fn spectrum(run: &mut Run) -> Result<()> {
    let (mut eps, mut par, mut conv) = (Vec::new(), Vec::new(), Vec::new());
    let mut meta = Vec::new();
    for p in run.cfg.parity.sectors() {
        let sol = run.sector(&run.cfg.model, p, false)?;
        eps.extend(&sol.energies);
        par.extend(sol.parity.iter().map(|q| q.label() as f64));
        conv.extend(sol.converged.iter().map(|&c| c as u8 as f64));
        meta.push((format!("epsilon_t_{}", sector_key(p)), sol.epsilon_t));
    }
    let mut d = Dataset::new(vec![
        Column::new("epsilon", ENERGY_UNIT, eps),
        Column::new("parity", "1", par),
        Column::new("converged", "1", conv),
    ]);
    for (k, v) in meta {
        d = d.with_meta(&k, v);
    }
    run.archive.insert("spectrum", d);
    Ok(())
}

fn chaos_map(run: &mut Run) -> Result<()> {
    let c = &run.cfg.chaos_map;
    let settings = ChaosMapSettings {
        samples_per_cell: c.samples_per_cell,
        lambda_cut: c.lambda_cut,
        t_final: c.t_final,
        seed: run.cfg.seed,
    };
    let map = chaos_fraction_map(&c.epsilons.points(), &c.gammas.points(), &run.cfg.model, settings)?;
    let (mut eps, mut gam, mut frac, mut failed) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (g, row) in map.fraction.iter().enumerate() {
        for (e, f) in row.iter().enumerate() {
            eps.push(map.epsilon_grid[e]);
            gam.push(map.gamma_grid[g]);
            frac.push(nan_if_none(*f));
            failed.push(map.failed[g][e] as f64);
        }
    }
    let d = Dataset::new(vec![
        Column::new("epsilon", ENERGY_UNIT, eps),
        Column::new("gamma", "omega", gam),
        Column::new("fraction", "1", frac),
        Column::new("failed", "count", failed),
    ])
    .with_meta("samples_per_cell", map.samples_per_cell)
    .with_meta("lambda_cut", map.lambda_cut)
    .with_meta("t_final", map.t_final)
    .with_meta("seed", map.seed);
    run.archive.insert("chaos_map", d);
    Ok(())
}

fn r_map(run: &mut Run) -> Result<()> {
    let parity = run.single_sector()?;
    let gammas = run.cfg.r_map.gammas.points();
    let mut spectra = Vec::with_capacity(gammas.len());
    for &g in &gammas {
        let params = run.cfg.model.with_gamma(g)?;
        let sol = run.sector(&params, parity, false)?;
        spectra.push(converged_levels(&sol)?);
    }
    let grid = r_map_from_spectra(&gammas, &spectra, &run.cfg.r_map.epsilons.points(), run.cfg.r_map.window)?;
    let (mut eps, mut gam, mut val) = (Vec::new(), Vec::new(), Vec::new());
    for (g, row) in grid.values.iter().enumerate() {
        for (e, v) in row.iter().enumerate() {
            eps.push(grid.epsilon_grid[e]);
            gam.push(grid.gamma_grid[g]);
            val.push(nan_if_none(*v));
        }
    }
    let eps_t: Vec<f64> = spectra.iter().map(|s| s.1).collect();
    let d = Dataset::new(vec![
        Column::new("epsilon", ENERGY_UNIT, eps),
        Column::new("gamma", "omega", gam),
        Column::new("mean_ratio", "1", val),
    ])
    .with_meta("window", run.cfg.r_map.window)
    .with_meta("epsilon_t", eps_t);
    run.archive.insert("r_map", d);
    Ok(())
}

fn peres_dataset(energies: Vec<f64>, parity: Vec<f64>, n: Vec<f64>, n_ex: Vec<f64>) -> Dataset {
    Dataset::new(vec![
        Column::new("epsilon", ENERGY_UNIT, energies),
        Column::new("parity", "1", parity),
        Column::new("n_over_j", "1/j", n),
        Column::new("n_ex_over_j", "1/j", n_ex),
    ])
}

fn peres(run: &mut Run) -> Result<()> {
    let mut rows: Vec<(f64, f64, f64, f64)> = Vec::new();
    for p in run.cfg.parity.sectors() {
        let sol = run.sector(&run.cfg.model, p, true)?;
        let idx = sol.converged_indices(None);
        let j = sol.params.j();
        let n = observable_diagonal(&sol, &idx, ObservableKind::PhotonNumber)?;
        let n_ex = observable_diagonal(&sol, &idx, ObservableKind::ExcitedAtoms)?;
        for (a, &k) in idx.iter().enumerate() {
            rows.push((sol.energies[k], sol.parity[k].label() as f64, n[a] / j, n_ex[a] / j));
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let d = peres_dataset(
        rows.iter().map(|r| r.0).collect(),
        rows.iter().map(|r| r.1).collect(),
        rows.iter().map(|r| r.2).collect(),
        rows.iter().map(|r| r.3).collect(),
    );
    run.archive.insert("peres", d);
    Ok(())
}

fn distribution_dataset(energies: Option<Vec<f64>>, name: &str, values: Vec<f64>, zero_mean: bool) -> Dataset {
    let fit = fit_distribution(&values, zero_mean);
    let mut cols = Vec::new();
    if let Some(e) = energies {
        cols.push(Column::new("epsilon", ENERGY_UNIT, e));
    }
    cols.push(Column::new(name, "1/j", values));
    Dataset::new(cols)
        .with_meta("count", fit.count)
        .with_meta("mean", fit.mean)
        .with_meta("sigma", fit.sigma)
        .with_meta("skewness", fit.skewness)
        .with_meta("excess_kurtosis", fit.excess_kurtosis)
        .with_meta("gaussian", fit.gaussian)
        .with_meta("histogram", fit.histogram)
}

fn eth_stats(run: &mut Run) -> Result<()> {
    let parity = run.single_sector()?;
    let sol = run.sector(&run.cfg.model, parity, true)?;
    let eth = run.cfg.eth.clone();
    let [lo, hi] = eth.range;
    let window = eth.window.unwrap_or_else(|| default_eth_window(sol.params.j()));
    let obs: Vec<ObservableMatrix> = run.timed("observables", |_| {
        Ok(vec![
            observable_matrix(&sol, ObservableKind::PhotonNumber)?.scaled(),
            observable_matrix(&sol, ObservableKind::ExcitedAtoms)?.scaled(),
        ])
    })?;
    let label = parity.label() as f64;
    run.archive.insert(
        "peres",
        peres_dataset(obs[0].energies.clone(), vec![label; obs[0].len()], obs[0].diagonal(), obs[1].diagonal()),
    );

    let keep: Vec<usize> = (0..obs[0].len()).filter(|&k| obs[0].energies[k] >= eth.fluctuation_floor).collect();
    let pick = |v: Vec<(f64, f64)>| -> Vec<f64> { keep.iter().map(|&k| v[k].1).collect() };
    let d = Dataset::new(vec![
        Column::new("epsilon", ENERGY_UNIT, keep.iter().map(|&k| obs[0].energies[k]).collect()),
        Column::new("delta_n", "1", pick(delta_mic(&obs[0], window)?)),
        Column::new("delta_n_ex", "1", pick(delta_mic(&obs[1], window)?)),
        Column::new("delta_e_n", "1", pick(delta_mic_extremal_profile(&obs[0], window)?)),
        Column::new("delta_e_n_ex", "1", pick(delta_mic_extremal_profile(&obs[1], window)?)),
    ])
    .with_meta("window_levels", window)
    .with_meta("epsilon_floor", eth.fluctuation_floor)
    .with_meta("epsilon_t", sol.epsilon_t);
    run.archive.insert("delta_mic", d);

    for o in &obs {
        let energies: Vec<f64> = o.indices_in(lo, hi).iter().map(|&k| o.energies[k]).collect();
        let diag = centered_diagonal(o, lo, hi)?;
        let off = offdiagonal_elements(o, lo, hi, eth.omega_max)?;
        let tag = o.kind.label();
        run.archive.insert(
            &format!("diagonal_{tag}"),
            distribution_dataset(Some(energies), "centered", diag, false).with_meta("range", [lo, hi]),
        );
        run.archive.insert(
            &format!("offdiagonal_{tag}"),
            distribution_dataset(None, "element", off, false)
                .with_meta("range", [lo, hi])
                .with_meta("omega_max", eth.omega_max),
        );
    }
    Ok(())
}

fn entropy_records(run: &mut Run, kinds: EntropyKinds) -> Result<Vec<EntropyRecord>> {
    let mut records = Vec::new();
    for p in run.cfg.parity.sectors() {
        let sol = run.sector(&run.cfg.model, p, true)?;
        records.extend(entropy_lattice(&sol, kinds)?);
    }
    records.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    Ok(records)
}

fn entropy_dataset(records: &[EntropyRecord]) -> Dataset {
    let col = |name: &str, unit: &str, f: &dyn Fn(&EntropyRecord) -> Option<f64>| {
        Column::new(name, unit, records.iter().map(|r| nan_if_none(f(r))).collect())
    };
    Dataset::new(vec![
        col("epsilon", ENERGY_UNIT, &|r| Some(r.epsilon)),
        col("parity", "1", &|r| Some(r.parity as f64)),
        col("s_en", "nats", &|r| r.s_en),
        col("exp_s_en_scaled", "1/(2j+1)", &|r| r.scaled_exp_entanglement()),
        col("s_sh_fock", "nats", &|r| r.s_sh_fock),
        col("s_sh_fock_scaled", "1/ln(2j^2)", &|r| r.s_sh_fock.map(|s| r.scaled_shannon(s))),
        col("s_sh_eff", "nats", &|r| r.s_sh_eff),
        col("s_sh_eff_scaled", "1/ln(2j^2)", &|r| r.s_sh_eff.map(|s| r.scaled_shannon(s))),
    ])
}

fn entropy(run: &mut Run) -> Result<()> {
    let e = run.cfg.entropy.clone();
    let kinds = EntropyKinds {
        entanglement: e.entanglement,
        shannon_fock: e.shannon_fock,
        shannon_efficient: e.shannon_efficient,
    };
    let records = entropy_records(run, kinds)?;
    run.archive.insert("entropy", entropy_dataset(&records));
    if e.entanglement && !records.is_empty() {
        let window = e.window.unwrap_or_else(|| default_eth_window(run.cfg.model.j()));
        let energies: Vec<f64> = records.iter().map(|r| r.epsilon).collect();
        let s: Vec<f64> = records.iter().map(|r| r.s_en.unwrap_or(f64::NAN)).collect();
        let delta = delta_mic_series(&energies, &s, window)?;
        let d = Dataset::new(vec![
            Column::new("epsilon", ENERGY_UNIT, energies),
            Column::new("delta_s_en", "1", delta.iter().map(|x| x.1).collect()),
        ])
        .with_meta("window_levels", window);
        run.archive.insert("entropy_fluctuations", d);
    }
    Ok(())
}

fn in_range(records: &[EntropyRecord], lo: f64, hi: f64) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.epsilon > lo && r.epsilon < hi)
        .filter_map(|r| r.scaled_exp_entanglement())
        .collect()
}

/// Mean ratio over `[RATIO_FLOOR, top]` of the levels of one symmetry class.
fn mean_ratio(energies: &[f64], top: f64) -> Result<Option<f64>> {
    if energies.len() < 3 {
        return Ok(None);
    }
    Ok(consecutive_ratios(energies)?.mean_in(RATIO_FLOOR, top))
}

fn tc_compare(run: &mut Run) -> Result<()> {
    let [lo, hi] = run.cfg.tc_compare.range;
    let lambda_max = run.cfg.tc_compare.lambda_max;
    let dicke = entropy_records(
        run,
        EntropyKinds {
            entanglement: true,
            shannon_fock: false,
            shannon_efficient: false,
        },
    )?;
    let labels: Vec<i8> = run.cfg.parity.sectors().iter().map(|p| p.label()).collect();
    let model = run.cfg.model;
    let tc: Vec<EntropyRecord> = run
        .timed("tavis-cummings", |_| Ok(tavis_cummings_entropies(&model, lambda_max)?))?
        .into_iter()
        .filter(|r| labels.contains(&r.parity))
        .collect();
    let edge = tc.last().map_or(f64::NEG_INFINITY, |r| r.epsilon);

    let var_dicke = variance(&in_range(&dicke, lo, hi));
    let var_tc = variance(&in_range(&tc, lo, hi));
    let mut ratios = serde_json::Map::new();
    for &l in &labels {
        let levels = |recs: &[EntropyRecord]| -> Vec<f64> {
            recs.iter().filter(|r| r.parity == l).map(|r| r.epsilon).collect()
        };
        let dicke_top = dicke.iter().map(|r| r.epsilon).fold(f64::NEG_INFINITY, f64::max);
        ratios.insert(
            format!("dicke_{}", if l > 0 { "even" } else { "odd" }),
            serde_json::to_value(mean_ratio(&levels(&dicke), dicke_top)?).expect("serializes"),
        );
        ratios.insert(
            format!("tavis_cummings_{}", if l > 0 { "even" } else { "odd" }),
            serde_json::to_value(mean_ratio(&levels(&tc), edge)?).expect("serializes"),
        );
    }
    let d = entropy_dataset(&dicke)
        .with_meta("range", [lo, hi])
        .with_meta("variance_exp_s_en_scaled", var_dicke);
    run.archive.insert("entropy", d);
    let d = entropy_dataset(&tc)
        .with_meta("range", [lo, hi])
        .with_meta("lambda_max", lambda_max)
        .with_meta("complete_below", edge)
        .with_meta("variance_exp_s_en_scaled", var_tc)
        .with_meta("variance_ratio_tc_over_dicke", var_tc / var_dicke)
        .with_meta("mean_ratio", ratios);
    run.archive.insert("tc_entropy", d);
    Ok(())
}

fn dos(run: &mut Run) -> Result<()> {
    let params = run.cfg.model;
    let grid = run.cfg.dos.epsilons.points();
    let nu: Vec<f64> = grid.iter().map(|&e| semiclassical_dos(e, &params)).collect();
    let weyl: Vec<f64> = grid.iter().map(|&e| semiclassical_count(e, &params)).collect();
    let mut cols = vec![
        Column::new("epsilon", ENERGY_UNIT, grid.clone()),
        Column::new("nu", "states per unit epsilon", nu),
        Column::new("count_semiclassical", "states", weyl),
    ];
    let mut meta = None;
    if run.cfg.dos.quantum_count {
        let mut levels = Vec::new();
        let mut eps_t = f64::INFINITY;
        for p in [Parity::Even, Parity::Odd] {
            let sol = run.sector(&params, p, false)?;
            let (l, t) = converged_levels(&sol)?;
            levels.extend(l);
            eps_t = eps_t.min(t);
        }
        levels.sort_by(f64::total_cmp);
        let count_below = |e: f64| levels.partition_point(|&x| x < e) as f64;
        cols.push(Column::new(
            "count_quantum",
            "states",
            grid.iter().map(|&e| if e <= eps_t { count_below(e) } else { f64::NAN }).collect(),
        ));
        let quantum = count_below(eps_t);
        let weyl_t = semiclassical_count(eps_t, &params);
        meta = Some((eps_t, quantum, weyl_t));
    }
    let mut d = Dataset::new(cols);
    if let Some((eps_t, quantum, weyl_t)) = meta {
        d = d
            .with_meta("epsilon_t", eps_t)
            .with_meta("quantum_count_below_epsilon_t", quantum)
            .with_meta("semiclassical_count_below_epsilon_t", weyl_t)
            .with_meta("relative_difference", (weyl_t - quantum) / quantum);
    }
    run.archive.insert("dos", d);
    Ok(())
}
