use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use topcap_core::formats::write_series_csv;
use topcap_core::signal::{gen_variation, voiced_like, voiceless_like, VariationKind, VariationSpec};
use topcap_core::ClassLabel;

use super::{write_records, Context, RecordRow, RECORDS_FILE};
use crate::CliError;

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// frequency, amplitude or average-line
    #[arg(long)]
    pub kind: VariationKind,
    /// Variation rate; larger is slower.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub c: u8,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
}

pub fn run(args: &SynthArgs, ctx: &mut Context) -> Result<(), CliError> {
    let mut spec = VariationSpec::new(args.kind, args.c);
    spec.t_max = args.t_max.unwrap_or(spec.t_max);
    spec.dt = args.dt.unwrap_or(spec.dt);
    let series = gen_variation::<f64>(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    ctx.set_params(
        "synth",
        json!({"kind": args.kind.as_str(), "c": spec.c, "t_max": spec.t_max, "dt": spec.dt, "samples": series.len()}),
    );
    ctx.outputs.write(&format!("{}.csv", series.id()), write_series_csv(&series))
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[arg(long, default_value_t = 200)]
    pub voiced: usize,
    #[arg(long, default_value_t = 200)]
    pub voiceless: usize,
    /// Standard deviation of the noise added to voiced-like carriers.
    #[arg(long, default_value_t = 0.05)]
    pub noise_sd: f64,
    #[arg(long, default_value_t = 16000)]
    pub sample_rate: u32,
}

pub fn run_corpus(args: &CorpusArgs, ctx: &mut Context) -> Result<(), CliError> {
    if !(args.noise_sd >= 0.0 && args.noise_sd.is_finite()) {
        return Err(CliError::Usage(format!("--noise-sd {} must be a finite nonnegative number", args.noise_sd)));
    }
    ctx.set_params(
        "corpus",
        json!({"voiced": args.voiced, "voiceless": args.voiceless, "noise_sd": args.noise_sd, "sample_rate": args.sample_rate}),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut rows = Vec::with_capacity(args.voiced + args.voiceless);
    for (label, count) in [(ClassLabel::Voiced, args.voiced), (ClassLabel::Voiceless, args.voiceless)] {
        for i in 0..count {
            let id = format!("{label}-{i:04}");
            let series = match label {
                ClassLabel::Voiced => voiced_like(&mut rng, id.clone(), args.sample_rate, args.noise_sd),
                ClassLabel::Voiceless => voiceless_like(&mut rng, id.clone(), args.sample_rate),
            }
            .map_err(|e| CliError::Internal(e.to_string()))?;
            let file = format!("series/{id}.csv");
            ctx.outputs.write(&file, write_series_csv(&series))?;
            rows.push(RecordRow { record_id: id, label, file, sample_rate: args.sample_rate });
        }
    }
    ctx.outputs.write(RECORDS_FILE, write_records(&rows)?)
}
