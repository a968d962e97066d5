mod common;

use hcms::app::{fit, load_corpus};
use hcms::config::RunConfig;
use hcms::corpus::{build_vocab, encode};
use hcms::nn::Hcms;
use hcms::train::checkpoint::{FORMAT_VERSION, MAGIC};
use hcms::train::{load_checkpoint, save_checkpoint, Checkpoint, CheckpointError};
use sha2::{Digest, Sha256};

fn small_config() -> RunConfig {
    let mut c = RunConfig::default();
    for (k, v) in [("embed_dim", "8"), ("filters", "6"), ("kernel", "3"), ("attention_hidden", "5"), ("max_len", "16"), ("epochs", "3")] {
        c.set(k, v).unwrap();
    }
    c
}

fn trained() -> Checkpoint {
    let config = small_config();
    let (train, _) = load_corpus(&common::data_path("train.conll"), &config).unwrap();
    fit(&train, &[], &config).unwrap().0
}

fn reseal(mut body: Vec<u8>) -> Vec<u8> {
    body.truncate(body.len() - 32);
    let digest = Sha256::digest(&body);
    body.extend_from_slice(&digest);
    body
}

#[test]
fn reloaded_model_predicts_bit_identically() {
    let ck = trained();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.hcms");
    save_checkpoint(&ck, &path).unwrap();
    let back = load_checkpoint(&path).unwrap();
    assert_eq!(back.config, ck.config);
    assert_eq!(back.vocab, ck.vocab);
    assert_eq!(back.to_bytes(), ck.to_bytes());

    let (test, _) = load_corpus(&common::data_path("test.conll"), &ck.config).unwrap();
    for r in &test {
        let e = encode(r, &ck.vocab, &ck.config.cleaning);
        let a = ck.model.predict_proba(&e.ids, &e.lang).unwrap();
        let b = back.model.predict_proba(&e.ids, &e.lang).unwrap();
        let bits = |t: &hcms::tensor::Tensor| t.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }
}

#[test]
fn truncation_is_detected_at_every_length() {
    let bytes = trained().to_bytes();
    for len in (0..bytes.len()).step_by(97).chain([bytes.len() - 1]) {
        let err = Checkpoint::from_bytes(&bytes[..len]).unwrap_err();
        assert!(matches!(err, CheckpointError::Corrupt(_) | CheckpointError::Version(_)), "{len}: {err}");
    }
}

#[test]
fn foreign_magic_and_future_version_are_rejected() {
    let bytes = trained().to_bytes();
    let mut magic = bytes.clone();
    magic[..4].copy_from_slice(b"GGUF");
    assert!(matches!(Checkpoint::from_bytes(&reseal(magic)), Err(CheckpointError::Version(_))));

    let mut version = bytes;
    version[4..8].copy_from_slice(&(FORMAT_VERSION + 1).to_le_bytes());
    assert!(matches!(Checkpoint::from_bytes(&reseal(version)), Err(CheckpointError::Version(_))));
    assert_eq!(MAGIC, b"HCMS");
}

#[test]
fn digest_mismatch_is_corrupt() {
    let mut bytes = trained().to_bytes();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x01;
    assert!(matches!(Checkpoint::from_bytes(&bytes), Err(CheckpointError::Corrupt(_))));
}

#[test]
fn config_and_tensors_must_agree() {
    let mut ck = trained();
    let mut other = ck.config.model_config(ck.vocab.len());
    other.embed_dim += 1;
    ck.model = Hcms::new(other, 0).unwrap();
    match Checkpoint::from_bytes(&ck.to_bytes()) {
        Err(CheckpointError::Shape { name, expected, found }) => {
            assert_eq!(name, "embedding.table");
            assert_eq!(expected[1] + 1, found[1]);
        }
        other => panic!("expected shape error, got {other:?}"),
    }
}

#[test]
fn missing_file_is_io() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_checkpoint(dir.path().join("absent")), Err(CheckpointError::Io(_))));
}

#[test]
fn vocabulary_survives() {
    let ck = trained();
    let back = Checkpoint::from_bytes(&ck.to_bytes()).unwrap();
    assert_eq!(back.vocab.tokens(), ck.vocab.tokens());
    let (train, _) = load_corpus(&common::data_path("train.conll"), &ck.config).unwrap();
    let cleaned: Vec<_> = train.iter().map(|r| hcms::corpus::clean(r, &ck.config.cleaning)).collect();
    assert_eq!(build_vocab(&cleaned, ck.config.min_count), back.vocab);
}
