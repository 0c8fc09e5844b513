//! The checked-in corpus files are the generator output. Set `MULLER_BLESS=1` to rewrite them.

use std::path::PathBuf;

use muller_core::corpus;
use muller_core::gamefile::GameFile;
use muller_core::zielonka::solve_game;
use muller_core::{Player, VertexSet};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn files_match_generators() {
    let dir = corpus_dir();
    let bless = std::env::var_os("MULLER_BLESS").is_some();
    for (name, g) in corpus::bundled() {
        let path = dir.join(format!("{name}.mg"));
        if bless {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, g.to_text()).unwrap();
        }
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(GameFile::parse(&text).unwrap(), g, "{name}");
    }
    let files = std::fs::read_dir(&dir).unwrap().filter(|e| {
        e.as_ref().unwrap().path().extension().is_some_and(|x| x == "mg")
    });
    assert_eq!(files.count(), 26);
}

#[test]
fn fig1_file_as_written() {
    let text = "muller 3;\n0 1 0,1;\n1 0 0,2;\n2 1 1,2;\nF0: {0},{2},{0,1,2};\nstart: 1;\n";
    let g = GameFile::parse(text).unwrap();
    assert_eq!(g, corpus::fig1());
    assert_eq!(g.arena.owner(0), Player::One);
    assert_eq!(g.arena.owner(1), Player::Zero);
    assert_eq!(g.arena.owner(2), Player::One);
    let d = solve_game(&g.arena, &g.condition).unwrap();
    assert_eq!(d.w0, VertexSet::full(3));
    assert_eq!(d.w1, VertexSet::EMPTY);
}

#[test]
fn semantic_errors() {
    let no_succ = "muller 2;\n0 0 1;\n1 1 ;\nF0: {0};\n";
    assert!(GameFile::parse(no_succ).is_err());
    let outside = "muller 3;\n0 1 0,1;\n1 0 0,2;\n2 1 1,2;\nF0: {0,3};\n";
    assert!(GameFile::parse(outside).is_err());
    let dangling = "muller 2;\n0 0 5;\n1 1 0;\nF0: {0};\n";
    assert!(GameFile::parse(dangling).is_err());
    let dup = "muller 2;\n0 0 1;\n0 1 0;\nF0: {0};\n";
    assert!(GameFile::parse(dup).is_err());
}
