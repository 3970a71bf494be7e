//! Embedding space loading and nearest-neighbor queries.
//!
//! Two on-disk formats are supported: the word2vec binary layout
//! (`"<vocab> <dim>\n"` header, then per entry a token terminated by 0x20,
//! `dim` little-endian f32 values, and a tolerated trailing 0x0A) and the
//! GloVe text layout (one `token v1 .. vd` line per entry). Values parsed as
//! f32 are widened to f64; vectors are kept raw and never normalized.

use crate::error::{Error, Result};
use crate::vector::{dot, norm};
use rayon::prelude::*;
use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

/// Vocabulary retention policy applied while loading.
///
/// `max_vocab` truncates *after* multi-word filtering, so the space ends up
/// with exactly `max_vocab` usable entries when the file has enough. File
/// order is the frequency rank; the cap keeps the highest-ranked entries.
#[derive(Clone, Debug, Default)]
pub struct VocabFilter {
    /// Keep at most this many entries (`None` keeps everything).
    pub max_vocab: Option<usize>,
    /// Drop tokens containing `_` or a space (multi-word phrases).
    pub drop_multiword: bool,
    /// Retry lookups with the lowercased token (lookup-time only; stored
    /// tokens keep their case).
    pub lowercase_fallback: bool,
}

impl VocabFilter {
    fn keeps(&self, token: &str) -> bool {
        !(self.drop_multiword && (token.contains('_') || token.contains(' ')))
    }
}

/// An in-memory vocabulary with one raw row vector per token.
pub struct EmbeddingSpace {
    words: Vec<String>,
    matrix: Vec<f64>, // row-major, len = words.len() * dim
    dim: usize,
    norms: Vec<f64>,
    index: HashMap<String, usize>,
    source_tag: String,
    lowercase_fallback: bool,
}

impl EmbeddingSpace {
    /// Builds a space from parallel token/row data, validating that tokens
    /// are unique, whitespace-free and non-empty, every value is finite, and
    /// the matrix shape matches.
    pub fn new(
        words: Vec<String>,
        matrix: Vec<f64>,
        dim: usize,
        source_tag: impl Into<String>,
        lowercase_fallback: bool,
    ) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        if dim == 0 || matrix.len() != words.len() * dim {
            return Err(Error::DimensionMismatch {
                left: matrix.len(),
                right: words.len() * dim,
            });
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if w.is_empty() || w.contains(char::is_whitespace) {
                return Err(Error::InvalidToken(w.clone()));
            }
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::DuplicateToken(w.clone()));
            }
            if matrix[i * dim..(i + 1) * dim].iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFiniteValue(w.clone()));
            }
        }
        let norms = (0..words.len())
            .map(|i| norm(&matrix[i * dim..(i + 1) * dim]))
            .collect();
        Ok(EmbeddingSpace {
            words,
            matrix,
            dim,
            norms,
            index,
            source_tag: source_tag.into(),
            lowercase_fallback,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    pub fn lowercase_fallback(&self) -> bool {
        self.lowercase_fallback
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn token(&self, idx: usize) -> &str {
        &self.words[idx]
    }

    pub fn row(&self, idx: usize) -> &[f64] {
        &self.matrix[idx * self.dim..(idx + 1) * self.dim]
    }

    /// Precomputed ‖row‖ (zero for all-zero rows).
    pub fn row_norm(&self, idx: usize) -> f64 {
        self.norms[idx]
    }

    /// Resolves a token to its row index, retrying lowercased when the space
    /// was loaded with `lowercase_fallback`.
    pub fn resolve(&self, word: &str) -> Result<usize> {
        if let Some(&i) = self.index.get(word) {
            return Ok(i);
        }
        if self.lowercase_fallback {
            if let Some(&i) = self.index.get(word.to_lowercase().as_str()) {
                return Ok(i);
            }
        }
        Err(Error::OutOfVocabulary(word.to_string()))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.resolve(word).is_ok()
    }

    /// The raw stored vector for `word`.
    pub fn lookup(&self, word: &str) -> Result<&[f64]> {
        Ok(self.row(self.resolve(word)?))
    }

    /// Top-`k` vocabulary entries by cosine similarity to `q`, descending,
    /// ties broken lexicographically by token. `exclude` tokens (resolved
    /// with the usual fallback; unknown ones ignored) and zero-norm rows are
    /// left out of the ranking.
    pub fn cosine_neighbors(
        &self,
        q: &[f64],
        k: usize,
        exclude: &[&str],
    ) -> Result<Vec<(String, f64)>> {
        if q.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: q.len(),
                right: self.dim,
            });
        }
        let qn = norm(q);
        if qn == 0.0 {
            return Err(Error::ZeroQueryVector);
        }
        let excluded: HashSet<usize> =
            exclude.iter().filter_map(|w| self.resolve(w).ok()).collect();
        let mut scored: Vec<(usize, f64)> = (0..self.len())
            .into_par_iter()
            .filter_map(|i| {
                if excluded.contains(&i) || self.norms[i] == 0.0 {
                    return None;
                }
                Some((i, dot(q, self.row(i)) / (qn * self.norms[i])))
            })
            .collect();
        scored.sort_unstable_by(|a, b| {
            b.1.total_cmp(&a.1).then_with(|| self.words[a.0].cmp(&self.words[b.0]))
        });
        scored.truncate(k);
        Ok(scored
            .into_iter()
            .map(|(i, s)| (self.words[i].clone(), s))
            .collect())
    }
}

/// Loads the word2vec binary format.
pub fn load_word2vec_binary(path: impl AsRef<Path>, filter: &VocabFilter) -> Result<EmbeddingSpace> {
    let file = File::open(path.as_ref())?;
    let mut r = BufReader::new(file);

    let mut header = Vec::new();
    read_until_byte(&mut r, b'\n', &mut header)?;
    let header_text = String::from_utf8_lossy(&header).trim().to_string();
    let mut parts = header_text.split_whitespace();
    let declared: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::MalformedHeader(header_text.clone()))?;
    let dim: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::MalformedHeader(header_text.clone()))?;
    if parts.next().is_some() || declared == 0 || dim == 0 {
        return Err(Error::MalformedHeader(header_text));
    }

    let mut words = Vec::new();
    let mut matrix = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut raw = vec![0u8; dim * 4];
    for entry in 0..declared {
        if filter.max_vocab.is_some_and(|m| words.len() >= m) {
            break;
        }
        let mut token_bytes = Vec::new();
        if read_until_byte(&mut r, b' ', &mut token_bytes)? == 0 {
            return Err(Error::TruncatedRecord(entry));
        }
        // A trailing newline from the previous entry shows up as a leading
        // byte of the next token.
        let start = token_bytes
            .iter()
            .position(|&b| b != b'\n' && b != b'\r')
            .unwrap_or(token_bytes.len());
        let token = String::from_utf8_lossy(&token_bytes[start..]).into_owned();
        r.read_exact(&mut raw)
            .map_err(|_| Error::TruncatedRecord(entry))?;
        if token.is_empty() || !filter.keeps(&token) || !seen.insert(token.clone()) {
            continue;
        }
        let row_start = matrix.len();
        for chunk in raw.chunks_exact(4) {
            let value = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
            if !value.is_finite() {
                return Err(Error::NonFiniteValue(token));
            }
            matrix.push(f64::from(value));
        }
        debug_assert_eq!(matrix.len() - row_start, dim);
        words.push(token);
    }
    if words.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let tag = source_tag("word2vec", path.as_ref(), filter);
    EmbeddingSpace::new(words, matrix, dim, tag, filter.lowercase_fallback)
}

/// Loads the GloVe text format; the first data line fixes the dimension.
pub fn load_glove_text(path: impl AsRef<Path>, filter: &VocabFilter) -> Result<EmbeddingSpace> {
    let file = File::open(path.as_ref())?;
    let r = BufReader::new(file);

    let mut words = Vec::new();
    let mut matrix = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut dim = 0usize;
    for (lineno, line) in r.lines().enumerate() {
        let lineno = lineno + 1;
        if filter.max_vocab.is_some_and(|m| words.len() >= m) {
            break;
        }
        let line = line?;
        let mut fields = line.split_whitespace();
        let Some(token) = fields.next() else { continue };
        let values: Vec<&str> = fields.collect();
        if dim == 0 {
            if values.is_empty() {
                return Err(Error::UnparsableNumber(lineno));
            }
            dim = values.len();
        } else if values.len() != dim {
            return Err(Error::InconsistentDimension(lineno));
        }
        let keep = filter.keeps(token) && !seen.contains(token);
        let mut row = Vec::with_capacity(if keep { dim } else { 0 });
        for v in &values {
            let x: f64 = v.parse().map_err(|_| Error::UnparsableNumber(lineno))?;
            if !x.is_finite() {
                return Err(Error::UnparsableNumber(lineno));
            }
            if keep {
                row.push(x);
            }
        }
        if keep {
            seen.insert(token.to_string());
            words.push(token.to_string());
            matrix.extend_from_slice(&row);
        }
    }
    if words.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let tag = source_tag("glove", path.as_ref(), filter);
    EmbeddingSpace::new(words, matrix, dim, tag, filter.lowercase_fallback)
}

/// Writes a space back out in the word2vec binary layout (test fixtures).
/// Values are narrowed to f32, so a space that was itself loaded from a
/// binary file round-trips bit-identically.
pub fn write_word2vec_binary(path: impl AsRef<Path>, space: &EmbeddingSpace) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{} {}", space.len(), space.dim())?;
    for i in 0..space.len() {
        w.write_all(space.token(i).as_bytes())?;
        w.write_all(b" ")?;
        for &x in space.row(i) {
            w.write_all(&(x as f32).to_le_bytes())?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn source_tag(format: &str, path: &Path, filter: &VocabFilter) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let cap = filter
        .max_vocab
        .map(|m| m.to_string())
        .unwrap_or_else(|| "all".to_string());
    format!(
        "{format}:{name}|max_vocab={cap}|drop_multiword={}|lowercase_fallback={}",
        filter.drop_multiword, filter.lowercase_fallback
    )
}

/// `BufRead::read_until` that drops the delimiter from the buffer.
fn read_until_byte(r: &mut impl BufRead, delim: u8, buf: &mut Vec<u8>) -> Result<usize> {
    let n = r.read_until(delim, buf)?;
    if buf.last() == Some(&delim) {
        buf.pop();
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space_from_rows(tokens: &[&str], rows: &[&[f64]]) -> EmbeddingSpace {
        let dim = rows[0].len();
        let matrix: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        EmbeddingSpace::new(
            tokens.iter().map(|s| s.to_string()).collect(),
            matrix,
            dim,
            "test",
            false,
        )
        .unwrap()
    }

    fn write_fixture(dir: &std::path::Path, entries: &[(&str, &[f32])]) -> std::path::PathBuf {
        let path = dir.join("fixture.bin");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "{} {}", entries.len(), entries[0].1.len()).unwrap();
        for (token, values) in entries {
            f.write_all(token.as_bytes()).unwrap();
            f.write_all(b" ").unwrap();
            for v in *values {
                f.write_all(&v.to_le_bytes()).unwrap();
            }
            f.write_all(b"\n").unwrap();
        }
        path
    }

    #[test]
    fn word2vec_round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_fixture(
            dir.path(),
            &[
                ("alpha", &[0.1f32, -2.5, 3.25]),
                ("beta", &[1.0f32, 0.5, -0.125]),
                ("gamma", &[9.75f32, 1e-20, 42.0]),
            ],
        );
        let space = load_word2vec_binary(&path, &VocabFilter::default()).unwrap();
        assert_eq!(space.len(), 3);
        assert_eq!(space.dim(), 3);
        assert_eq!(space.lookup("beta").unwrap(), &[1.0, 0.5, -0.125]);

        let back = dir.path().join("back.bin");
        write_word2vec_binary(&back, &space).unwrap();
        let reloaded = load_word2vec_binary(&back, &VocabFilter::default()).unwrap();
        assert_eq!(reloaded.words(), space.words());
        for i in 0..space.len() {
            assert_eq!(reloaded.row(i), space.row(i), "row {i} changed bits");
        }
    }

    #[test]
    fn word2vec_reader_accepts_entries_without_trailing_newline() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("packed.bin");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "2 2").unwrap();
        for (token, values) in [("one", [1.0f32, 2.0]), ("two", [3.0f32, 4.0])] {
            f.write_all(token.as_bytes()).unwrap();
            f.write_all(b" ").unwrap();
            for v in values {
                f.write_all(&v.to_le_bytes()).unwrap();
            }
            // no 0x0A separator
        }
        let space = load_word2vec_binary(&path, &VocabFilter::default()).unwrap();
        assert_eq!(space.words(), &["one".to_string(), "two".to_string()]);
        assert_eq!(space.lookup("two").unwrap(), &[3.0, 4.0]);
    }

    #[test]
    fn multiword_drop_and_cap_interact_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_fixture(
            dir.path(),
            &[
                ("the", &[1.0f32, 0.0]),
                ("New_York", &[9.0f32, 9.0]),
                ("of", &[0.0f32, 1.0]),
                ("and", &[1.0f32, 1.0]),
            ],
        );
        // The cap counts usable entries, so the phrase is skipped and the
        // space still gets three words.
        let filter = VocabFilter {
            max_vocab: Some(3),
            drop_multiword: true,
            lowercase_fallback: false,
        };
        let space = load_word2vec_binary(&path, &filter).unwrap();
        assert_eq!(
            space.words(),
            &["the".to_string(), "of".to_string(), "and".to_string()]
        );

        // Without the filter the cap keeps file order.
        let capped = VocabFilter {
            max_vocab: Some(2),
            ..VocabFilter::default()
        };
        let space = load_word2vec_binary(&path, &capped).unwrap();
        assert_eq!(
            space.words(),
            &["the".to_string(), "New_York".to_string()]
        );
    }

    #[test]
    fn word2vec_error_cases() {
        let dir = tempfile::tempdir().unwrap();

        let bad_header = dir.path().join("bad_header.bin");
        std::fs::write(&bad_header, b"banana\n").unwrap();
        assert!(matches!(
            load_word2vec_binary(&bad_header, &VocabFilter::default()),
            Err(Error::MalformedHeader(_))
        ));

        let truncated = dir.path().join("truncated.bin");
        let mut f = File::create(&truncated).unwrap();
        writeln!(f, "2 3").unwrap();
        f.write_all(b"word ").unwrap();
        f.write_all(&1.0f32.to_le_bytes()).unwrap(); // 1 of 3 values
        drop(f);
        assert!(matches!(
            load_word2vec_binary(&truncated, &VocabFilter::default()),
            Err(Error::TruncatedRecord(0))
        ));

        let nonfinite = dir.path().join("nan.bin");
        let mut f = File::create(&nonfinite).unwrap();
        writeln!(f, "1 2").unwrap();
        f.write_all(b"w ").unwrap();
        f.write_all(&f32::NAN.to_le_bytes()).unwrap();
        f.write_all(&0.0f32.to_le_bytes()).unwrap();
        drop(f);
        assert!(matches!(
            load_word2vec_binary(&nonfinite, &VocabFilter::default()),
            Err(Error::NonFiniteValue(w)) if w == "w"
        ));

        let emptied = write_fixture(dir.path(), &[("a_b", &[1.0f32])]);
        let filter = VocabFilter {
            drop_multiword: true,
            ..VocabFilter::default()
        };
        assert!(matches!(
            load_word2vec_binary(&emptied, &filter),
            Err(Error::EmptyVocabulary)
        ));
    }

    #[test]
    fn glove_text_loads_and_validates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vectors.txt");
        std::fs::write(&path, "cat 1.0 2.0\ndog 3.5 -1.25\n").unwrap();
        let space = load_glove_text(&path, &VocabFilter::default()).unwrap();
        assert_eq!(space.dim(), 2);
        assert_eq!(space.lookup("dog").unwrap(), &[3.5, -1.25]);

        let ragged = dir.path().join("ragged.txt");
        std::fs::write(&ragged, "cat 1.0 2.0\ndog 3.5\n").unwrap();
        assert!(matches!(
            load_glove_text(&ragged, &VocabFilter::default()),
            Err(Error::InconsistentDimension(2))
        ));

        let garbled = dir.path().join("garbled.txt");
        std::fs::write(&garbled, "cat 1.0 2.0\ndog 3.5 banana\n").unwrap();
        assert!(matches!(
            load_glove_text(&garbled, &VocabFilter::default()),
            Err(Error::UnparsableNumber(2))
        ));

        // parse::<f64> accepts "NaN"/"inf"; the loader must not.
        let nan = dir.path().join("nan.txt");
        std::fs::write(&nan, "cat NaN 2.0\n").unwrap();
        assert!(matches!(
            load_glove_text(&nan, &VocabFilter::default()),
            Err(Error::UnparsableNumber(1))
        ));
    }

    #[test]
    fn lowercase_fallback_is_lookup_time_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lower.txt");
        std::fs::write(&path, "january 1.0 0.0\nparis 0.0 1.0\n").unwrap();
        let filter = VocabFilter {
            lowercase_fallback: true,
            ..VocabFilter::default()
        };
        let space = load_glove_text(&path, &filter).unwrap();
        assert_eq!(space.lookup("January").unwrap(), &[1.0, 0.0]);
        assert_eq!(space.resolve("Paris").unwrap(), 1);
        assert_eq!(space.words()[0], "january"); // stored case untouched
        assert!(matches!(
            space.lookup("Tokyo"),
            Err(Error::OutOfVocabulary(w)) if w == "Tokyo"
        ));

        let exact = load_glove_text(&path, &VocabFilter::default()).unwrap();
        assert!(exact.lookup("January").is_err());
    }

    #[test]
    fn cosine_neighbors_ranks_with_lexicographic_ties() {
        // b and c tie on cosine against q = (1,0); b sorts first.
        let space = space_from_rows(
            &["a", "c", "b", "d"],
            &[&[1.0, 0.0], &[2.0, 2.0], &[1.0, 1.0], &[-1.0, 0.0]],
        );
        let got = space.cosine_neighbors(&[1.0, 0.0], 4, &[]).unwrap();
        let tokens: Vec<&str> = got.iter().map(|(w, _)| w.as_str()).collect();
        assert_eq!(tokens, ["a", "b", "c", "d"]);
        assert_eq!(got[0].1, 1.0);
        assert_eq!(got[1].1, got[2].1);

        let got = space.cosine_neighbors(&[1.0, 0.0], 2, &["a"]).unwrap();
        let tokens: Vec<&str> = got.iter().map(|(w, _)| w.as_str()).collect();
        assert_eq!(tokens, ["b", "c"]);

        assert!(matches!(
            space.cosine_neighbors(&[0.0, 0.0], 3, &[]),
            Err(Error::ZeroQueryVector)
        ));
        assert!(matches!(
            space.cosine_neighbors(&[1.0, 0.0, 0.0], 3, &[]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cosine_neighbors_skips_zero_rows() {
        let space = space_from_rows(&["a", "nil"], &[&[1.0, 0.0], &[0.0, 0.0]]);
        let got = space.cosine_neighbors(&[1.0, 1.0], 5, &[]).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].0, "a");
    }

    #[test]
    fn cosine_ranking_invariant_under_power_of_two_scaling() {
        // Power-of-two scaling is exact in f64, so even scores match bitwise.
        let space = space_from_rows(
            &["a", "b", "c", "d", "e"],
            &[
                &[0.3, -1.2, 0.7],
                &[1.1, 0.4, -0.2],
                &[-0.5, 0.9, 1.3],
                &[0.8, 0.8, 0.8],
                &[-1.0, -1.0, 0.1],
            ],
        );
        let q = [0.37, -0.81, 1.44];
        let q2: Vec<f64> = q.iter().map(|x| x * 0.5).collect();
        let a = space.cosine_neighbors(&q, 5, &[]).unwrap();
        let b = space.cosine_neighbors(&q2, 5, &[]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn space_construction_rejects_bad_input() {
        assert!(matches!(
            EmbeddingSpace::new(vec![], vec![], 2, "t", false),
            Err(Error::EmptyVocabulary)
        ));
        assert!(matches!(
            EmbeddingSpace::new(vec!["a".into()], vec![1.0], 2, "t", false),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            EmbeddingSpace::new(
                vec!["a".into(), "a".into()],
                vec![1.0, 2.0],
                1,
                "t",
                false
            ),
            Err(Error::DuplicateToken(_))
        ));
        assert!(matches!(
            EmbeddingSpace::new(vec!["a b".into()], vec![1.0], 1, "t", false),
            Err(Error::InvalidToken(_))
        ));
        assert!(matches!(
            EmbeddingSpace::new(vec!["a".into()], vec![f64::INFINITY], 1, "t", false),
            Err(Error::NonFiniteValue(_))
        ));
    }
}
