//! The desk corpus: small posets and affine posets shipped with the crate.

use posetahedra_core::affine::AffinePoset;
use posetahedra_core::Poset;

use crate::formats::{parse_affine_poset, parse_poset};

macro_rules! entries {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../corpus/", $name, ".json")))),*]
    };
}

pub const POSETS: &[(&str, &str)] = entries!(
    "chain2", "chain3", "chain4", "chain5", "chain6", "claw3", "claw4", "claw5", "vee3", "n4", "diamond4", "w5", "h6",
);

pub const AFFINE_POSETS: &[(&str, &str)] = entries!("cchain2", "cchain3", "cchain4", "cclaw2", "cclaw3", "cclaw4");

pub fn posets() -> Vec<(&'static str, Poset)> {
    POSETS
        .iter()
        .map(|&(name, text)| (name, parse_poset(text).expect("corpus poset")))
        .collect()
}

pub fn affine_posets() -> Vec<(&'static str, AffinePoset)> {
    AFFINE_POSETS
        .iter()
        .map(|&(name, text)| (name, parse_affine_poset(text).expect("corpus affine poset")))
        .collect()
}

pub fn poset(name: &str) -> Option<Poset> {
    POSETS.iter().find(|e| e.0 == name).map(|e| parse_poset(e.1).expect("corpus poset"))
}

pub fn affine_poset(name: &str) -> Option<AffinePoset> {
    AFFINE_POSETS
        .iter()
        .find(|e| e.0 == name)
        .map(|e| parse_affine_poset(e.1).expect("corpus affine poset"))
}
