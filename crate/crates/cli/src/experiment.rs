use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use probelink::identify::{fit_regression, run_identification, IdentifyParams, RegressionSample};
use probelink::simlab::{default_roster, run_experiment, ExperimentConfig, Transcript};

use crate::{ExperimentArgs, IdentifyArgs, SimulateArgs, SweepArgs};

impl ExperimentArgs {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig::new(self.people, self.lectures, self.attendance, self.probe, self.seed)
            .with_noise(self.noise, self.noise_pool)
    }
}

fn write(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub(crate) fn simulate(args: &SimulateArgs) -> Result<()> {
    let config = args.experiment.config();
    let transcript = run_experiment(&config, &default_roster(config.num_people))?;
    let mut text = serde_json::to_string_pretty(&transcript)?;
    text.push('\n');
    write(&args.out, text.as_bytes())?;
    eprintln!("{} observations of {} people", transcript.observations.len(), config.num_people);
    Ok(())
}

pub(crate) fn identify(args: &IdentifyArgs) -> Result<()> {
    let text = fs::read_to_string(&args.transcript).with_context(|| format!("reading {}", args.transcript.display()))?;
    let transcript: Transcript =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", args.transcript.display()))?;
    let params = IdentifyParams { mode: args.mode.into(), cap: args.cap, threshold: args.threshold, ..Default::default() };
    let run = run_identification(&transcript, &params)?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["observation", "accuracy"])?;
    for (i, acc) in run.accuracy.iter().enumerate() {
        csv.write_record([(i + 1).to_string(), acc.to_string()])?;
    }
    write(&args.out, &csv.into_inner()?)?;

    println!("person\tmac\tweight\tcorrect");
    for (name, pick) in &run.final_proposal.proposals {
        let truth = transcript.ground_truth.mac_of(name);
        match pick {
            Some(p) => println!("{name}\t{}\t{}\t{}", p.mac, p.weight, truth == Some(p.mac)),
            None => println!("{name}\t-\t-\tfalse"),
        }
    }
    if let Some(last) = run.accuracy.last() {
        println!("final accuracy\t{last}");
    }
    Ok(())
}

/// A cross product of experiment settings for the regression sweep.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub people: usize,
    pub lectures: Vec<usize>,
    pub probe: Vec<f64>,
    pub attendance: Vec<f64>,
    pub seeds: Vec<u64>,
    pub noise: usize,
    pub noise_pool: usize,
    pub params: IdentifyParams,
}

impl SweepGrid {
    pub fn sample_count(&self) -> usize {
        self.lectures.len() * self.probe.len() * self.attendance.len() * self.seeds.len()
    }
}

/// One sample per (probe, attendance, seed, lecture count): the accuracy
/// after that many lectures. Lecture `i` of a run does not depend on the
/// run's length, so each (probe, attendance, seed) is simulated once at
/// the longest lecture count and read at every requested count.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<RegressionSample>> {
    if grid.lectures.contains(&0) {
        bail!("lecture counts must be at least 1");
    }
    let longest = grid.lectures.iter().copied().max().unwrap_or(0);
    let mut runs = Vec::new();
    for &probe in &grid.probe {
        for &att in &grid.attendance {
            for &seed in &grid.seeds {
                runs.push((probe, att, seed));
            }
        }
    }
    let per_run: Vec<Vec<RegressionSample>> = runs
        .par_iter()
        .map(|&(probe, att, seed)| -> Result<Vec<RegressionSample>> {
            let config =
                ExperimentConfig::new(grid.people, longest, att, probe, seed).with_noise(grid.noise, grid.noise_pool);
            let transcript = run_experiment(&config, &default_roster(grid.people))?;
            let run = run_identification(&transcript, &grid.params)?;
            Ok(grid
                .lectures
                .iter()
                .map(|&l| RegressionSample {
                    observation_number: l as f64,
                    probe_prob: probe,
                    attendance_prob: att,
                    accuracy: run.accuracy[l - 1],
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_run.into_iter().flatten().collect())
}

pub(crate) fn sweep_command(args: &SweepArgs) -> Result<()> {
    let grid = SweepGrid {
        people: args.people,
        lectures: args.lectures.clone(),
        probe: args.probe.clone(),
        attendance: args.attendance.clone(),
        seeds: (0..args.seeds).map(|k| args.seed.wrapping_add(k)).collect(),
        noise: args.noise,
        noise_pool: args.noise_pool,
        params: IdentifyParams { mode: args.mode.into(), cap: args.cap, ..Default::default() },
    };
    let samples = sweep(&grid)?;
    let mut csv = csv::Writer::from_writer(Vec::new());
    for s in &samples {
        csv.serialize(s)?;
    }
    write(&args.out, &csv.into_inner()?)?;
    let summary = fit_regression(&samples)?;
    match &args.summary {
        Some(path) => write(path, summary.to_string().as_bytes())?,
        None => print!("{summary}"),
    }
    Ok(())
}
