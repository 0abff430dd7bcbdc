use std::fs;
use std::io::Write;
use std::path::Path;

use super::{Graph, StoreError};
use crate::io::ntriples;

/// Writes `graph` as canonical N-Triples (sorted, LF-terminated). The file is
/// written next to `path` and renamed into place.
pub fn save_snapshot(graph: &Graph, path: impl AsRef<Path>) -> Result<(), StoreError> {
    let path = path.as_ref();
    let text = ntriples::write(graph);
    let tmp = path.with_extension("nt.tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<Graph, StoreError> {
    let text = fs::read_to_string(path)?;
    ntriples::parse(&text).map_err(|d| StoreError::Parse {
        line: d.line,
        column: d.column,
        message: d.message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Literal, RdfTerm, Triple};
    use crate::vocab::Iri;

    fn sample() -> Graph {
        let mut g = Graph::new();
        let s = RdfTerm::Iri(Iri::new("http://e/s").unwrap());
        let p = RdfTerm::Iri(Iri::new("http://e/p").unwrap());
        g.insert(Triple::new(s.clone(), p.clone(), Literal::lang("ciao", "it")))
            .unwrap();
        g.insert(Triple::new(s, p.clone(), RdfTerm::Blank("b1".into())))
            .unwrap();
        g.insert(Triple::new(
            RdfTerm::Blank("b1".into()),
            p,
            Literal::string("line\nbreak"),
        ))
        .unwrap();
        g
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("store.nt");
        let g = sample();
        save_snapshot(&g, &path).unwrap();
        assert_eq!(load_snapshot(&path).unwrap(), g);
    }

    #[test]
    fn empty_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.nt");
        save_snapshot(&Graph::new(), &path).unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"");
        assert!(load_snapshot(&path).unwrap().is_empty());
    }

    #[test]
    fn sorted_lf_output() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.nt");
        save_snapshot(&sample(), &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        let mut sorted = lines.clone();
        sorted.sort();
        assert_eq!(lines, sorted);
    }

    #[test]
    fn truncated_file_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.nt");
        save_snapshot(&sample(), &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let cut = &text[..text.len() - 6];
        fs::write(&path, cut).unwrap();
        match load_snapshot(&path) {
            Err(StoreError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse failure, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_failure() {
        assert!(matches!(
            load_snapshot("/nonexistent/dir/x.nt"),
            Err(StoreError::Io(_))
        ));
    }
}
