use wtc::pipeline;
use wtc::store::{self, StoreEntry, StoreError};
use wtc_core::hecke::Correspondence;
use wtc_core::lattice::HeckeDatum;
use wtc_core::temperament::build_wtc;

fn entry(n: usize, ell: i64, k: usize) -> StoreEntry {
    let h = HeckeDatum::new(n, ell, k).unwrap();
    let w = build_wtc(&h, None).unwrap();
    let c = Correspondence::new(&w).unwrap();
    StoreEntry::new(&w, &c, w.vertex_count)
}

#[test]
fn text_round_trips() {
    for (n, ell, k) in [(2, 2, 1), (2, 3, 1), (2, 2, 2), (3, 2, 1)] {
        let e = entry(n, ell, k);
        let text = e.to_text();
        let back = StoreEntry::parse(&text).unwrap();
        assert_eq!(back, e);
        assert_eq!(back.to_text(), text);
    }
}

#[test]
fn independent_builds_are_byte_identical() {
    assert_eq!(entry(2, 3, 1).to_text(), entry(2, 3, 1).to_text());
    assert_eq!(entry(3, 2, 2).to_text(), entry(3, 2, 2).to_text());
}

#[test]
fn flipped_byte_fails_the_hash() {
    let text = entry(2, 2, 1).to_text();
    let at = text.find("CELLS").unwrap() + 10;
    let mut bytes = text.into_bytes();
    bytes[at] = if bytes[at] == b'1' { b'2' } else { b'1' };
    let bad = String::from_utf8(bytes).unwrap();
    assert!(matches!(StoreEntry::parse(&bad), Err(StoreError::HashMismatch { .. })));
}

#[test]
fn truncated_store_is_rejected() {
    let text = entry(2, 2, 1).to_text();
    let cut = &text[..text.len() / 2];
    assert!(StoreEntry::parse(cut).is_err());
}

#[test]
fn build_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let h = HeckeDatum::new(2, 3, 1).unwrap();
    let (e1, path, built) = pipeline::build(dir.path(), &h, None).unwrap();
    assert!(built);
    assert_eq!(path, store::store_path(dir.path(), &h));
    let bytes = std::fs::read(&path).unwrap();
    let (e2, _, built) = pipeline::build(dir.path(), &h, None).unwrap();
    assert!(!built);
    assert_eq!(e1, e2);
    assert_eq!(std::fs::read(&path).unwrap(), bytes);
}

#[test]
fn stored_correspondence_verifies() {
    let e = StoreEntry::parse(&entry(3, 2, 1).to_text()).unwrap();
    for c in pipeline::verify(&e) {
        assert!(c.ok, "{}: {}", c.name, c.detail);
    }
}
