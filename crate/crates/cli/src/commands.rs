use std::fs::File;
use std::io::{BufWriter, Write};

use privhalf::data::{synth_margin_dataset, write_libsvm, PreprocessMode, Scaler};
use privhalf::halfspace::NORM_TOLERANCE;
use privhalf::kernel::{FourierFeatureMap, KernelSpec};
use privhalf::parallel::with_threads;
use privhalf::privacy::{calibrate_sigma, perceptron_noise, perceptron_privacy_check};
use privhalf::robust::{accuracy, certified_radii, curve_from_radii, gamma_grid, write_curve_csv, write_radii_csv, RadiusRecord};
use privhalf::trainers::expmech::SCORE_MARGIN_FACTOR;
use privhalf::trainers::{
    load_model, save_model, train_one_vs_rest, DpSgdParams, PerceptronConfig, StopMode, Trainer,
};
use privhalf::{FeatureVector, MulticlassDataset, MulticlassModel, SeededRng};
use serde_json::json;

use crate::cli::{Accountant, Algo, CalibrateArgs, CurveArgs, EvaluateArgs, Mode, SynthArgs, TestInput, TrainArgs};
use crate::error::CliError;
use crate::input::{fit_scaler, load_idx_pair, load_libsvm_file, scale};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_budget(epsilon: f64, delta: f64) -> Result<(), CliError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(usage(format!("--epsilon must be a positive number, got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(usage(format!("--delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

fn create(path: &std::path::Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn calibrate(a: &CalibrateArgs) -> Result<(), CliError> {
    check_budget(a.epsilon, a.delta)?;
    if a.steps == 0 {
        return Err(usage("--steps must be positive"));
    }
    match a.accountant {
        Accountant::Rdp => {
            let q = match (a.sampling_rate, a.batch_size, a.n) {
                (Some(q), _, _) => q,
                (None, Some(b), Some(n)) if n > 0 => (b as f64 / n as f64).min(1.0),
                _ => return Err(usage("rdp accounting needs --sampling-rate or --batch-size with --n")),
            };
            if !(q > 0.0 && q <= 1.0) {
                return Err(usage(format!("sampling rate must lie in (0, 1], got {q}")));
            }
            let cal = calibrate_sigma(a.epsilon, a.delta, q, a.steps)?;
            println!("accountant: rdp");
            println!("sampling_rate: {q}");
            println!("steps: {}", a.steps);
            println!("sigma: {}", cal.sigma);
            println!("best_order: {}", cal.best_order);
            println!("epsilon: {}", cal.epsilon);
            println!("delta: {}", a.delta);
        }
        Accountant::Analytic => {
            let noise = perceptron_noise(a.steps, a.epsilon, a.delta)?;
            println!("accountant: analytic");
            println!("sampling_rate: {}", noise.sampling_rate);
            println!("steps: {}", a.steps);
            println!("sigma: {}", noise.sigma);
            println!("laplace_scale: {}", noise.laplace_scale);
            if a.epsilon < 1.0 {
                let (_, composed) = perceptron_privacy_check(a.epsilon, a.delta, a.steps)?;
                println!("epsilon: {}", composed.epsilon);
                println!("delta: {}", composed.delta);
            } else {
                println!("epsilon: not certified (composition requires epsilon < 1)");
            }
        }
    }
    Ok(())
}

fn preprocess_mode(m: Mode) -> PreprocessMode {
    match m {
        Mode::Pixel => PreprocessMode::Pixel,
        Mode::UnitBall => PreprocessMode::UnitBall,
    }
}

fn max_norm(data: &MulticlassDataset) -> f64 {
    data.features().iter().map(FeatureVector::norm).fold(0.0, f64::max)
}

pub fn train(a: &TrainArgs) -> Result<(), CliError> {
    if a.batch_size == 0 || a.epochs == 0 {
        return Err(usage("--batch-size and --epochs must be positive"));
    }
    if !(a.gamma_prime >= 0.0 && a.gamma_prime.is_finite()) {
        return Err(usage("--gamma-prime must be >= 0"));
    }
    let privacy = match (a.no_privacy, a.epsilon, a.delta) {
        (true, _, _) => None,
        (false, Some(e), Some(d)) => {
            check_budget(e, d)?;
            Some((e, d))
        }
        _ => return Err(usage("give --epsilon and --delta, or --no-privacy")),
    };
    let mode = preprocess_mode(a.mode);
    let loaded = match (&a.input.train_images, &a.input.train_labels, &a.input.train_libsvm, a.input.dim) {
        (Some(im), Some(lb), None, _) => load_idx_pair(im, lb)?,
        (None, None, Some(path), Some(dim)) => load_libsvm_file(path, dim, None)?,
        _ => return Err(usage("give --train-images with --train-labels, or --train-libsvm with --dim")),
    };
    let scaler = fit_scaler(&loaded, mode)?;
    let mut data = scale(&loaded, &scaler)?;
    if data.num_classes() < 2 {
        return Err(CliError::Data("training data has fewer than 2 classes".into()));
    }
    let map = match a.kernel_width {
        Some(width) => {
            let spec = KernelSpec {
                d_hat: a.kernel_dim,
                sigma_hat: width,
                seed: a.seed,
            };
            let m = FourierFeatureMap::sample(data.dimension(), spec).map_err(|e| usage(e.to_string()))?;
            data = data.embed(&m)?;
            Some(m)
        }
        None => None,
    };

    let n = data.len();
    let q = (a.batch_size as f64 / n as f64).min(1.0);
    let per_epoch = n.div_ceil(a.batch_size) as u64;
    let in_ball = max_norm(&data) <= 1.0 + NORM_TOLERANCE;
    let need_ball = |algo: Algo| -> Result<(), CliError> {
        if privacy.is_some() && !in_ball {
            return Err(usage(format!(
                "{} with privacy needs every input in the unit ball; use --mode unit_ball or a kernel",
                algo.name()
            )));
        }
        Ok(())
    };

    let mut lines = vec![format!("algo: {}", a.algo.name())];
    let mut digest = json!({
        "algo": a.algo.name(),
        "preprocessing": { "mode": mode.to_string(), "divisor": scaler.divisor },
        "class_labels": loaded.class_labels,
        "seed": a.seed,
        "batch_size": a.batch_size,
        "epochs": a.epochs,
        "gamma_prime": a.gamma_prime,
        "privacy": privacy.map(|(e, d)| json!({ "epsilon": e, "delta": d })),
    });
    let mut set = |k: &str, v: serde_json::Value| {
        digest[k] = v;
    };

    let trainer = match a.algo {
        Algo::PerceptronFixed => {
            need_ball(a.algo)?;
            let t = a.epochs * per_epoch;
            let sigma = match privacy {
                Some((e, d)) => {
                    let cal = calibrate_sigma(e, d, q, t)?;
                    lines.push(format!(
                        "accountant: rdp epsilon={} delta={d} order={} sigma={}",
                        cal.epsilon, cal.best_order, cal.sigma
                    ));
                    cal.sigma
                }
                None => 0.0,
            };
            set("iterations", json!(t));
            set("sampling_rate", json!(q));
            set("sigma", json!(sigma));
            lines.push(format!("iterations: {t}"));
            lines.push(format!("sampling_rate: {q}"));
            lines.push(format!("sigma: {sigma}"));
            Trainer::Perceptron(PerceptronConfig {
                gamma_prime: a.gamma_prime,
                sampling_rate: q,
                iterations: t,
                laplace_scale: f64::INFINITY,
                sigma,
                alpha: a.alpha,
                mode: StopMode::FixedT,
            })
        }
        Algo::Perceptron => {
            need_ball(a.algo)?;
            let t = a.steps.unwrap_or(a.epochs * per_epoch);
            let (p, sigma, b) = match privacy {
                Some((e, d)) => {
                    if e >= 1.0 {
                        return Err(usage("the early-stopping perceptron's accounting needs --epsilon < 1"));
                    }
                    let (noise, composed) = perceptron_privacy_check(e, d, t)?;
                    lines.push(format!(
                        "accountant: analytic epsilon={} delta={} sigma={} laplace_scale={}",
                        composed.epsilon, composed.delta, noise.sigma, noise.laplace_scale
                    ));
                    (noise.sampling_rate, noise.sigma, noise.laplace_scale)
                }
                None => (q, 0.0, f64::INFINITY),
            };
            set("iterations", json!(t));
            set("sampling_rate", json!(p));
            set("sigma", json!(sigma));
            set("laplace_scale", if b.is_finite() { json!(b) } else { json!(null) });
            set("alpha", json!(a.alpha));
            lines.push(format!("iterations: {t}"));
            lines.push(format!("sampling_rate: {p}"));
            Trainer::Perceptron(PerceptronConfig {
                gamma_prime: a.gamma_prime,
                sampling_rate: p,
                iterations: t,
                laplace_scale: b,
                sigma,
                alpha: a.alpha,
                mode: StopMode::EarlyStop,
            })
        }
        Algo::Expmech => {
            if a.candidates == 0 {
                return Err(usage("--candidates must be positive"));
            }
            let gamma = a.gamma_prime / SCORE_MARGIN_FACTOR;
            let epsilon = privacy.map_or(f64::INFINITY, |(e, _)| e);
            if privacy.is_some() {
                lines.push(format!("accountant: pure epsilon={epsilon} delta=0"));
            }
            set("gamma", json!(gamma));
            set("candidates", json!(a.candidates));
            Trainer::ExpMech {
                gamma,
                epsilon,
                candidates: a.candidates,
            }
        }
        Algo::DpsgdHinge => {
            if !(a.gamma_prime > 0.0) {
                return Err(usage("dpsgd-hinge needs --gamma-prime > 0"));
            }
            let params = DpSgdParams {
                gamma: a.gamma_prime,
                epsilon: privacy.map(|(e, _)| e),
                delta: privacy.map_or(0.5, |(_, d)| d),
                batch_rate: q,
                learning_rate: a.learning_rate,
                lambda_reg: a.lambda,
                epochs: a.epochs,
            };
            let t = params.iterations();
            let sigma = match privacy {
                Some((e, d)) => {
                    let cal = calibrate_sigma(e, d, q, t)?;
                    lines.push(format!(
                        "accountant: rdp epsilon={} delta={d} order={} sigma={}",
                        cal.epsilon, cal.best_order, cal.sigma
                    ));
                    cal.sigma
                }
                None => 0.0,
            };
            set("iterations", json!(t));
            set("sampling_rate", json!(q));
            set("sigma", json!(sigma));
            set("learning_rate", json!(a.learning_rate));
            set("lambda", json!(a.lambda));
            lines.push(format!("iterations: {t}"));
            lines.push(format!("sigma: {sigma}"));
            Trainer::DpSgd { params, sigma }
        }
    };

    let model = train_one_vs_rest(&data, &trainer, &SeededRng::new(a.seed), a.threads)?;
    let model = match &map {
        Some(m) => model.with_kernel(m)?,
        None => model,
    }
    .with_training(digest);
    save_model(&model, &a.out)?;

    let k = model.num_classes();
    lines.push(format!("classes: {k}"));
    lines.push(format!("train_examples: {n}"));
    match privacy {
        Some((e, d)) => {
            let delta = if a.algo == Algo::Expmech { 0.0 } else { d };
            lines.push(format!("per_class_budget: epsilon={e} delta={delta}"));
            lines.push(format!(
                "composed_budget: epsilon={} delta={} (basic composition over {k} classes)",
                k as f64 * e,
                k as f64 * delta
            ));
        }
        None => lines.push("privacy: none".into()),
    }
    lines.push(format!("model: {}", a.out.display()));
    for l in lines {
        println!("{l}");
    }
    Ok(())
}

fn scaler_from_model(model: &MulticlassModel) -> Result<Scaler, CliError> {
    let pre = &model.training["preprocessing"];
    let mode: PreprocessMode = pre["mode"]
        .as_str()
        .ok_or_else(|| CliError::Data("model lacks preprocessing mode".into()))?
        .parse()?;
    let divisor = pre["divisor"]
        .as_f64()
        .ok_or_else(|| CliError::Data("model lacks preprocessing divisor".into()))?;
    Ok(Scaler { mode, divisor })
}

struct Evaluation {
    model: MulticlassModel,
    records: Vec<RadiusRecord>,
    mode: PreprocessMode,
}

fn evaluate_model(input: &TestInput) -> Result<Evaluation, CliError> {
    let model = load_model(&input.model)?;
    let scaler = scaler_from_model(&model)?;
    let loaded = match (&input.test_images, &input.test_labels, &input.test_libsvm) {
        (Some(im), Some(lb), None) => load_idx_pair(im, lb)?,
        (None, None, Some(path)) => {
            let labels: Vec<i64> = serde_json::from_value(model.training["class_labels"].clone())
                .map_err(|e| CliError::Data(format!("model class labels: {e}")))?;
            load_libsvm_file(path, model.input_dimension, Some(&labels))?
        }
        _ => return Err(usage("give --test-images with --test-labels, or --test-libsvm")),
    };
    if loaded.raw.dimension() != model.input_dimension {
        return Err(CliError::Data(format!(
            "test inputs have dimension {} but the model expects {}",
            loaded.raw.dimension(),
            model.input_dimension
        )));
    }
    if loaded.raw.num_classes() != model.num_classes() {
        return Err(CliError::Data(format!(
            "test data has {} classes but the model has {}",
            loaded.raw.num_classes(),
            model.num_classes()
        )));
    }
    let test = scale(&loaded, &scaler)?;
    let map = model.feature_map()?;
    let records = with_threads(input.threads, || certified_radii(&model, &test, map.as_ref()))??;
    Ok(Evaluation {
        model,
        records,
        mode: scaler.mode,
    })
}

pub fn evaluate(a: &EvaluateArgs) -> Result<(), CliError> {
    let ev = evaluate_model(&a.input)?;
    if let Some(path) = &a.radii_out {
        let mut w = create(path)?;
        write_radii_csv(&ev.records, &mut w)?;
        w.flush()?;
    }
    println!("mode: {}", ev.mode);
    println!("classes: {}", ev.model.num_classes());
    println!("examples: {}", ev.records.len());
    println!("accuracy: {}", accuracy(&ev.records));
    Ok(())
}

pub fn curve(a: &CurveArgs) -> Result<(), CliError> {
    let grid = gamma_grid(a.gamma_max, a.gamma_steps).map_err(|e| usage(e.to_string()))?;
    let ev = evaluate_model(&a.input)?;
    let radii: Vec<f64> = ev.records.iter().map(|r| r.radius).collect();
    let curve = curve_from_radii(&radii, &grid)?;
    let mut w = create(&a.out)?;
    write_curve_csv(&curve, &mut w)?;
    w.flush()?;
    println!("mode: {}", ev.mode);
    println!("accuracy: {}", accuracy(&ev.records));
    println!("points: {}", curve.points.len());
    println!("curve: {}", a.out.display());
    Ok(())
}

pub fn synth(a: &SynthArgs) -> Result<(), CliError> {
    if a.d == 0 || a.n == 0 {
        return Err(usage("--d and --n must be positive"));
    }
    if !(a.gamma > 0.0 && a.gamma < 1.0) {
        return Err(usage(format!("--gamma must lie in (0, 1), got {}", a.gamma)));
    }
    let (data, w) = synth_margin_dataset(a.d, a.n, a.gamma, a.seed)?;
    let classes = data.labels().iter().map(|l| (l.as_i64() > 0) as usize).collect();
    let multi = MulticlassDataset::new(a.d, data.features().to_vec(), classes, 2)?;
    let mut out = create(&a.out)?;
    out.write_all(write_libsvm(&multi, &[-1, 1])?.as_bytes())?;
    out.flush()?;
    let doc = json!({
        "dimension": a.d,
        "gamma": a.gamma,
        "seed": a.seed,
        "w_star": w.weights(),
    });
    let mut wf = create(&a.w_out)?;
    serde_json::to_writer_pretty(&mut wf, &doc)?;
    wf.write_all(b"\n")?;
    wf.flush()?;
    println!("examples: {}", data.len());
    println!("dataset: {}", a.out.display());
    println!("separator: {}", a.w_out.display());
    Ok(())
}
