//! Trajectory classification: a linear SVM over dissimilarity embeddings
//! (ppfSVM) and a k-nearest-neighbor baseline, with training, prediction
//! and cross-validation pipelines.

mod knn;
mod model;
mod pipeline;
mod proximity;
mod svm;

pub use knn::{knn_predict, KnnModel};
pub use model::{class_index, train_ppfsvm, OneVsRest, PpfSvmModel, Prediction, Standardizer};
pub use pipeline::{
    cross_validate, cross_validate_many, fit, prepare, stratified_folds, CSelection, Classifier,
    ClassifierSpec, CvReport, FoldPrediction, ModelArchive, PipelineConfig, ResampleMode, C_GRID,
    INNER_FOLDS, MODEL_FORMAT, MODEL_VERSION,
};
pub use proximity::{embed, embed_all, proximity, proximity_matrix, ProximityMatrix};
pub use svm::{train_binary, LinearSvm, SolverInfo, GAP_TOLERANCE, MAX_EPOCHS};
