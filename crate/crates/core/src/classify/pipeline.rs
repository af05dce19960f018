//! End-to-end training, prediction and cross-validation: optional
//! re-sampling with thresholds taken from the training data, trajectory
//! dissimilarities, then a ppfSVM or k-NN head.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::knn::{vote, KnnModel};
use super::model::{argmax, class_index, OneVsRest, PpfSvmModel, Prediction};
use super::proximity::{embed_all, pairwise, proximity_matrix};
use crate::data::{confusion_and_metrics, MetricsReport};
use crate::error::{Error, Result};
use crate::geometry::DEFAULT_K;
use crate::trajectory::{resample, ResampleThresholds, Trajectory, TrajectoryMetric};

pub const MODEL_FORMAT: &str = "gramtraj-model";
pub const MODEL_VERSION: u32 = 1;

/// Candidate values of C for inner cross-validation, tried in this order.
pub const C_GRID: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];
pub const INNER_FOLDS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ResampleMode {
    Off,
    Fixed {
        zeta1: f64,
        zeta2: f64,
    },
    /// Derived from the training trajectories.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CSelection {
    Fixed(f64),
    /// Inner cross-validation over [`C_GRID`].
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClassifierSpec {
    PpfSvm { c: CSelection },
    Knn { neighbors: usize },
}

impl ClassifierSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ClassifierSpec::PpfSvm {
                c: CSelection::Fixed(c),
            } if !(c > 0.0 && c.is_finite()) => {
                Err(Error::InvalidParameter(format!("C = {c} must be > 0")))
            }
            ClassifierSpec::Knn { neighbors: 0 } => {
                Err(Error::InvalidParameter("K must be ≥ 1".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Closeness weight used for re-sampling.
    pub k: f64,
    pub metric: TrajectoryMetric,
    pub resample: ResampleMode,
    pub classifier: ClassifierSpec,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            k: DEFAULT_K,
            metric: TrajectoryMetric::closeness_dtw(DEFAULT_K),
            resample: ResampleMode::Auto,
            classifier: ClassifierSpec::PpfSvm {
                c: CSelection::Fixed(1.0),
            },
            seed: 0,
        }
    }
}

impl PipelineConfig {
    /// Thresholds for a model trained on `train`.
    pub fn thresholds(&self, train: &[Trajectory]) -> Result<Option<ResampleThresholds>> {
        match self.resample {
            ResampleMode::Off => Ok(None),
            ResampleMode::Fixed { zeta1, zeta2 } => ResampleThresholds::new(zeta1, zeta2).map(Some),
            ResampleMode::Auto => ResampleThresholds::auto(train, self.k).map(Some),
        }
    }

    fn validate(&self) -> Result<()> {
        self.metric.frame.validate()?;
        self.classifier.validate()?;
        crate::geometry::check_weight(self.k)
    }
}

/// Re-samples every trajectory (in parallel) when thresholds are given.
pub fn prepare(
    set: &[Trajectory],
    thresholds: Option<ResampleThresholds>,
    k: f64,
) -> Result<Vec<Trajectory>> {
    match thresholds {
        None => Ok(set.to_vec()),
        Some(t) => set.par_iter().map(|x| resample(x, t, k)).collect(),
    }
}

/// Partially filled m×m dissimilarity table over one prepared set.
struct Table {
    m: usize,
    values: Vec<f64>,
}

impl Table {
    fn compute(
        set: &[Trajectory],
        pairs: Vec<(usize, usize)>,
        metric: &TrajectoryMetric,
    ) -> Result<Self> {
        let m = set.len();
        let d = pairwise(set, set, &pairs, metric)?;
        let mut values = vec![f64::NAN; m * m];
        for i in 0..m {
            values[i * m + i] = 0.0;
        }
        for (&(i, j), v) in pairs.iter().zip(d) {
            values[i * m + j] = v;
            values[j * m + i] = v;
        }
        Ok(Table { m, values })
    }

    /// Pairs among `train` plus pairs from every `test` index to `train`.
    fn for_split(
        set: &[Trajectory],
        train: &[usize],
        test: &[usize],
        metric: &TrajectoryMetric,
    ) -> Result<Self> {
        let mut pairs = Vec::new();
        for (a, &i) in train.iter().enumerate() {
            pairs.extend(train[a + 1..].iter().map(|&j| (i, j)));
        }
        for &i in test {
            pairs.extend(train.iter().map(|&j| (i, j)));
        }
        Table::compute(set, pairs, metric)
    }

    fn full(set: &[Trajectory], metric: &TrajectoryMetric) -> Result<Self> {
        let m = set.len();
        let pairs = (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .collect();
        Table::compute(set, pairs, metric)
    }

    fn row(&self, i: usize, cols: &[usize]) -> Vec<f64> {
        debug_assert!(i < self.m);
        cols.iter().map(|&j| self.values[i * self.m + j]).collect()
    }
}

/// A trained classifier head over dissimilarities to the training indices.
enum Head {
    Svm(OneVsRest),
    Knn(usize),
}

impl Head {
    fn predict(&self, row: &[f64], train_labels: &[usize], classes: usize) -> (usize, Vec<f64>) {
        match self {
            Head::Svm(ovr) => {
                let scores = ovr.scores(row);
                (argmax(&scores), scores)
            }
            Head::Knn(neighbors) => vote(row, train_labels, classes, *neighbors),
        }
    }
}

fn fit_svm(
    table: &Table,
    train: &[usize],
    labels: &[usize],
    classes: usize,
    c: f64,
    seed: u64,
) -> Result<OneVsRest> {
    let rows: Vec<Vec<f64>> = train.iter().map(|&i| table.row(i, train)).collect();
    let y: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
    OneVsRest::fit(&rows, &y, classes, c, seed)
}

/// C from [`C_GRID`] with the most correct inner cross-validation
/// predictions on `train`; ties go to the earlier grid value.
fn select_c(
    table: &Table,
    train: &[usize],
    labels: &[usize],
    classes: usize,
    seed: u64,
) -> Result<f64> {
    let folds = INNER_FOLDS.min(train.len());
    if folds < 2 {
        return Ok(1.0);
    }
    let train_labels: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
    let assignment = stratified_folds(&train_labels, folds, seed)?;
    let mut best = (0, C_GRID[0]);
    for (g, &c) in C_GRID.iter().enumerate() {
        let mut correct = 0;
        for f in 0..folds {
            let inner: Vec<usize> = (0..train.len())
                .filter(|&a| assignment[a] != f)
                .map(|a| train[a])
                .collect();
            let held: Vec<usize> = (0..train.len())
                .filter(|&a| assignment[a] == f)
                .map(|a| train[a])
                .collect();
            let ovr = fit_svm(table, &inner, labels, classes, c, seed)?;
            for &i in &held {
                let scores = ovr.scores(&table.row(i, &inner));
                correct += usize::from(argmax(&scores) == labels[i]);
            }
        }
        if g == 0 || correct > best.0 {
            best = (correct, c);
        }
    }
    Ok(best.1)
}

fn train_head(
    table: &Table,
    train: &[usize],
    labels: &[usize],
    classes: usize,
    spec: &ClassifierSpec,
    seed: u64,
) -> Result<(Head, Option<f64>)> {
    match *spec {
        ClassifierSpec::PpfSvm { c } => {
            let c = match c {
                CSelection::Fixed(c) => c,
                CSelection::Auto => select_c(table, train, labels, classes, seed)?,
            };
            Ok((
                Head::Svm(fit_svm(table, train, labels, classes, c, seed)?),
                Some(c),
            ))
        }
        ClassifierSpec::Knn { neighbors } => {
            if neighbors > train.len() {
                return Err(Error::InvalidParameter(format!(
                    "K = {neighbors} exceeds the {} training trajectories",
                    train.len()
                )));
            }
            Ok((Head::Knn(neighbors), None))
        }
    }
}

/// Fold of every sample. Each class is shuffled with `seed` and dealt
/// round-robin, continuing the count across classes, so fold sizes differ
/// by at most one and classes spread as evenly as their counts permit.
pub fn stratified_folds(labels: &[usize], folds: usize, seed: u64) -> Result<Vec<usize>> {
    let m = labels.len();
    if folds < 2 || folds > m {
        return Err(Error::InvalidParameter(format!(
            "folds = {folds} must lie in 2..={m}"
        )));
    }
    let classes = labels.iter().max().map_or(0, |c| c + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0; m];
    let mut next = 0;
    for c in 0..classes {
        let mut members: Vec<usize> = (0..m).filter(|&i| labels[i] == c).collect();
        members.shuffle(&mut rng);
        for i in members {
            out[i] = next % folds;
            next += 1;
        }
    }
    Ok(out)
}

/// The trained classifier inside a [`ModelArchive`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Classifier {
    PpfSvm(PpfSvmModel),
    Knn(KnnModel),
}

/// Self-describing trained model. The references are the training
/// trajectories after re-sampling, stored as factored `(U, S)` points;
/// a ppfSVM needs all of them to embed a new trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArchive {
    pub format: String,
    pub version: u32,
    pub config: PipelineConfig,
    /// Thresholds resolved on the training set and reused at test time.
    pub thresholds: Option<ResampleThresholds>,
    pub classifier: Classifier,
}

/// Trains a model on the labeled `set`.
pub fn fit(set: &[Trajectory], config: &PipelineConfig) -> Result<ModelArchive> {
    config.validate()?;
    let (classes, labels) = class_index(set)?;
    if classes.len() < 2 {
        return Err(Error::InsufficientClasses(classes.len()));
    }
    let thresholds = config.thresholds(set)?;
    let prepared = prepare(set, thresholds, config.k)?;
    let classifier = match config.classifier {
        ClassifierSpec::Knn { neighbors } => {
            Classifier::Knn(KnnModel::fit(&prepared, neighbors, &config.metric)?)
        }
        ClassifierSpec::PpfSvm { c } => {
            let prox = proximity_matrix(&prepared, &config.metric)?;
            let rows: Vec<Vec<f64>> = (0..prox.len()).map(|i| prox.row(i).to_vec()).collect();
            let c = match c {
                CSelection::Fixed(c) => c,
                CSelection::Auto => {
                    let table = Table {
                        m: rows.len(),
                        values: rows.concat(),
                    };
                    let all: Vec<usize> = (0..rows.len()).collect();
                    select_c(&table, &all, &labels, classes.len(), config.seed)?
                }
            };
            let ovr = OneVsRest::fit(&rows, &labels, classes.len(), c, config.seed)?;
            Classifier::PpfSvm(PpfSvmModel {
                classes,
                references: prepared,
                metric: config.metric,
                c,
                seed: config.seed,
                ovr,
            })
        }
    };
    Ok(ModelArchive {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        config: *config,
        thresholds,
        classifier,
    })
}

impl ModelArchive {
    pub fn classes(&self) -> &[String] {
        match &self.classifier {
            Classifier::PpfSvm(m) => &m.classes,
            Classifier::Knn(m) => &m.classes,
        }
    }

    fn references(&self) -> &[Trajectory] {
        match &self.classifier {
            Classifier::PpfSvm(m) => &m.references,
            Classifier::Knn(m) => &m.references,
        }
    }

    /// Predictions for every trajectory, in input order.
    pub fn predict_many(&self, xs: &[Trajectory]) -> Result<Vec<Prediction>> {
        let prepared = prepare(xs, self.thresholds, self.config.k)?;
        let rows = embed_all(&prepared, self.references(), &self.config.metric)?;
        rows.iter()
            .map(|row| match &self.classifier {
                Classifier::PpfSvm(m) => m.predict_embedded(row),
                Classifier::Knn(m) => m.predict_embedded(row),
            })
            .collect()
    }

    pub fn predict(&self, x: &Trajectory) -> Result<Prediction> {
        Ok(self.predict_many(std::slice::from_ref(x))?.remove(0))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: ModelArchive = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        model.check()?;
        Ok(model)
    }

    fn check(&self) -> Result<()> {
        if self.format != MODEL_FORMAT || self.version != MODEL_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported model format {} v{}",
                self.format, self.version
            )));
        }
        self.config.validate()?;
        let refs = self.references();
        let classes = self.classes().len();
        if classes < 2 {
            return Err(Error::InsufficientClasses(classes));
        }
        if let Some(first) = refs.first() {
            for r in refs {
                crate::error::ensure_same_n(first.n(), r.n())?;
            }
        }
        let m = refs.len();
        match &self.classifier {
            Classifier::PpfSvm(s) => {
                let ovr = &s.ovr;
                let lens_ok = ovr.machines.len() == classes
                    && ovr.machines.iter().all(|w| w.weights.len() == m)
                    && ovr.standardizer.mean.len() == m
                    && ovr.standardizer.scale.len() == m;
                if !lens_ok {
                    return Err(Error::InvalidInput(
                        "model weights do not match its references".into(),
                    ));
                }
            }
            Classifier::Knn(k) => {
                if k.labels.len() != m
                    || k.labels.iter().any(|&l| l >= classes)
                    || k.neighbors < 1
                    || k.neighbors > m
                {
                    return Err(Error::InvalidInput("k-NN model is inconsistent".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPrediction {
    pub id: String,
    pub truth: String,
    pub predicted: String,
    pub fold: usize,
}

/// Cross-validation outcome for one classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub classifier: ClassifierSpec,
    pub report: MetricsReport,
    /// One entry per input trajectory, in input order.
    pub predictions: Vec<FoldPrediction>,
    /// Thresholds used in each fold.
    pub thresholds: Vec<Option<ResampleThresholds>>,
    /// C used in each fold (ppfSVM only).
    pub chosen_c: Vec<Option<f64>>,
}

/// Stratified `folds`-fold cross-validation of `config.classifier`.
pub fn cross_validate(
    set: &[Trajectory],
    folds: usize,
    config: &PipelineConfig,
) -> Result<CvReport> {
    Ok(cross_validate_many(set, folds, config, &[config.classifier])?.remove(0))
}

/// Cross-validates several classifiers on the same folds, sharing the
/// dissimilarity computations. `config.classifier` is ignored.
pub fn cross_validate_many(
    set: &[Trajectory],
    folds: usize,
    config: &PipelineConfig,
    specs: &[ClassifierSpec],
) -> Result<Vec<CvReport>> {
    config.validate()?;
    for s in specs {
        s.validate()?;
    }
    let (classes, labels) = class_index(set)?;
    let assignment = stratified_folds(&labels, folds, config.seed)?;
    let m = set.len();
    let mut predicted = vec![vec![0usize; m]; specs.len()];
    let mut chosen = vec![Vec::with_capacity(folds); specs.len()];
    let mut fold_thresholds = Vec::with_capacity(folds);

    // Thresholds that do not depend on the split allow one shared table.
    let shared = match config.resample {
        ResampleMode::Auto => None,
        _ => {
            let t = config.thresholds(set)?;
            let prepared = prepare(set, t, config.k)?;
            Some((t, Table::full(&prepared, &config.metric)?))
        }
    };

    for f in 0..folds {
        let train: Vec<usize> = (0..m).filter(|&i| assignment[i] != f).collect();
        let test: Vec<usize> = (0..m).filter(|&i| assignment[i] == f).collect();
        let local;
        let (thresholds, table) = match &shared {
            Some((t, table)) => (*t, table),
            None => {
                let train_set: Vec<Trajectory> = train.iter().map(|&i| set[i].clone()).collect();
                let t = config.thresholds(&train_set)?;
                let prepared = prepare(set, t, config.k)?;
                local = Table::for_split(&prepared, &train, &test, &config.metric)?;
                (t, &local)
            }
        };
        fold_thresholds.push(thresholds);
        let train_labels: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
        for (s, spec) in specs.iter().enumerate() {
            let (head, c) = train_head(table, &train, &labels, classes.len(), spec, config.seed)?;
            chosen[s].push(c);
            for &i in &test {
                predicted[s][i] = head
                    .predict(&table.row(i, &train), &train_labels, classes.len())
                    .0;
            }
        }
    }

    let truths: Vec<String> = labels.iter().map(|&l| classes[l].clone()).collect();
    specs
        .iter()
        .zip(predicted)
        .zip(chosen)
        .map(|((spec, pred), chosen_c)| {
            let names: Vec<String> = pred.iter().map(|&p| classes[p].clone()).collect();
            let report = confusion_and_metrics(&names, &truths, &classes, Some(&assignment))?;
            let predictions = (0..m)
                .map(|i| FoldPrediction {
                    id: set[i].id().map_or_else(|| i.to_string(), str::to_string),
                    truth: truths[i].clone(),
                    predicted: names[i].clone(),
                    fold: assignment[i],
                })
                .collect();
            Ok(CvReport {
                classifier: *spec,
                report,
                predictions,
                thresholds: fold_thresholds.clone(),
                chosen_c,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synth_generate, SynthSpec};
    use crate::trajectory::{Alignment, FrameMetric};

    fn synth(spec: SynthSpec) -> Vec<Trajectory> {
        synth_generate(&spec)
            .unwrap()
            .iter()
            .map(|r| r.to_trajectory().unwrap())
            .collect()
    }

    fn small() -> Vec<Trajectory> {
        synth(SynthSpec {
            classes: 2,
            per_class: 6,
            landmarks: 10,
            min_frames: 6,
            max_frames: 9,
            ..SynthSpec::default()
        })
    }

    #[test]
    fn folds_are_stratified_and_balanced() {
        let labels: Vec<usize> = (0..23).map(|i| usize::from(i % 3 == 0)).collect();
        let f = stratified_folds(&labels, 5, 4).unwrap();
        let mut sizes = [0; 5];
        for &x in &f {
            sizes[x] += 1;
        }
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        for c in 0..2 {
            let mut per = [0; 5];
            for i in (0..23).filter(|&i| labels[i] == c) {
                per[f[i]] += 1;
            }
            assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
        }
        assert_eq!(f, stratified_folds(&labels, 5, 4).unwrap());
        assert!(stratified_folds(&labels, 1, 0).is_err());
        assert!(stratified_folds(&labels, 24, 0).is_err());
    }

    #[test]
    fn separable_set_is_perfect() {
        let set = synth(
            SynthSpec {
                classes: 2,
                per_class: 6,
                landmarks: 10,
                min_frames: 6,
                max_frames: 9,
                ..SynthSpec::default()
            }
            .clean(),
        );
        let config = PipelineConfig::default();
        let knn = ClassifierSpec::Knn { neighbors: 1 };
        let out = cross_validate_many(&set, 3, &config, &[config.classifier, knn]).unwrap();
        for r in &out {
            assert_eq!(r.report.accuracy, 100.0, "{:?}", r.classifier);
            assert_eq!(r.report.counts[0][1] + r.report.counts[1][0], 0);
            assert_eq!(r.report.folds.as_ref().unwrap().accuracies.len(), 3);
        }
    }

    #[test]
    fn leave_one_out_runs() {
        let set = small();
        let config = PipelineConfig {
            classifier: ClassifierSpec::Knn { neighbors: 1 },
            ..PipelineConfig::default()
        };
        let r = cross_validate(&set, set.len(), &config).unwrap();
        assert_eq!(r.report.folds.unwrap().accuracies.len(), set.len());
        assert_eq!(r.thresholds.len(), set.len());
    }

    #[test]
    fn same_seed_same_report() {
        let set = small();
        let config = PipelineConfig {
            classifier: ClassifierSpec::PpfSvm {
                c: CSelection::Auto,
            },
            ..PipelineConfig::default()
        };
        let a = cross_validate(&set, 3, &config).unwrap();
        let b = cross_validate(&set, 3, &config).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert!(a
            .chosen_c
            .iter()
            .all(|c| c.is_some_and(|c| C_GRID.contains(&c))));
    }

    #[test]
    fn shared_table_matches_per_fold_table() {
        // With fixed thresholds the shared full table must give the same
        // predictions as recomputing per fold.
        let set = small();
        let t = ResampleThresholds::auto(&set, DEFAULT_K).unwrap();
        let fixed = PipelineConfig {
            resample: ResampleMode::Fixed {
                zeta1: t.zeta1,
                zeta2: t.zeta2,
            },
            ..PipelineConfig::default()
        };
        let r = cross_validate(&set, 3, &fixed).unwrap();
        let labels = class_index(&set).unwrap().1;
        let assignment = stratified_folds(&labels, 3, 0).unwrap();
        let prepared = prepare(&set, Some(t), DEFAULT_K).unwrap();
        for f in 0..3 {
            let train: Vec<usize> = (0..set.len()).filter(|&i| assignment[i] != f).collect();
            let test: Vec<usize> = (0..set.len()).filter(|&i| assignment[i] == f).collect();
            let table = Table::for_split(&prepared, &train, &test, &fixed.metric).unwrap();
            let (head, _) = train_head(&table, &train, &labels, 2, &fixed.classifier, 0).unwrap();
            for &i in &test {
                let p = head.predict(&table.row(i, &train), &[], 2).0;
                assert_eq!(r.predictions[i].predicted, format!("c{p}"));
            }
        }
    }

    #[test]
    fn fit_predict_round_trip() {
        let set = small();
        for classifier in [
            ClassifierSpec::PpfSvm {
                c: CSelection::Fixed(1.0),
            },
            ClassifierSpec::Knn { neighbors: 1 },
        ] {
            let config = PipelineConfig {
                classifier,
                ..PipelineConfig::default()
            };
            let model = fit(&set, &config).unwrap();
            let preds = model.predict_many(&set).unwrap();
            for (p, t) in preds.iter().zip(&set) {
                assert_eq!(Some(p.label.as_str()), t.label());
            }
            let json = model.to_json();
            let back = ModelArchive::from_json(&json).unwrap();
            assert_eq!(back, model);
            assert_eq!(back.to_json(), json);
            assert_eq!(back.predict(&set[3]).unwrap(), preds[3]);
        }
    }

    #[test]
    fn auto_c_and_alternative_metrics_fit() {
        let set = small();
        let config = PipelineConfig {
            metric: TrajectoryMetric {
                frame: FrameMetric::Flat,
                alignment: Alignment::Lockstep,
            },
            resample: ResampleMode::Off,
            classifier: ClassifierSpec::PpfSvm {
                c: CSelection::Auto,
            },
            ..PipelineConfig::default()
        };
        let model = fit(&set, &config).unwrap();
        assert!(model.thresholds.is_none());
        let Classifier::PpfSvm(svm) = &model.classifier else {
            panic!()
        };
        assert!(C_GRID.contains(&svm.c));
    }

    #[test]
    fn corrupt_archives_are_rejected() {
        let set = small();
        let model = fit(&set, &PipelineConfig::default()).unwrap();
        let mut wrong = model.clone();
        wrong.format = "other".into();
        assert!(ModelArchive::from_json(&wrong.to_json()).is_err());
        let mut short = model.clone();
        if let Classifier::PpfSvm(s) = &mut short.classifier {
            s.ovr.machines[0].weights.pop();
        }
        assert!(ModelArchive::from_json(&short.to_json()).is_err());
        assert!(matches!(
            ModelArchive::from_json("{"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn errors() {
        let set = small();
        let single: Vec<_> = set
            .iter()
            .map(|t| t.clone().with_label(Some("x".into())))
            .collect();
        assert_eq!(
            fit(&single, &PipelineConfig::default()),
            Err(Error::InsufficientClasses(1))
        );
        let bad = PipelineConfig {
            classifier: ClassifierSpec::PpfSvm {
                c: CSelection::Fixed(-1.0),
            },
            ..PipelineConfig::default()
        };
        assert!(matches!(fit(&set, &bad), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            cross_validate(&set, 1, &PipelineConfig::default()),
            Err(Error::InvalidParameter(_))
        ));
    }
}
