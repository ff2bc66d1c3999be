//! Arabic broken-plural morphology.

pub mod classes;
pub mod cli;
pub mod formdict;
pub mod generator;
pub mod lexicon;
pub mod morphotax;
pub mod segmenter;
pub mod translit;
