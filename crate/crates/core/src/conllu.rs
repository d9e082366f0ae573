//! CoNLL-U subset reader: dependency-parsed review corpora.
//!
//! Reviews arrive pre-parsed as `.conllu` files: 10 tab-separated columns
//! per token, blank lines between sentences, `#` comment lines. Two
//! metadata comments tie sentences to their source:
//!
//! ```text
//! # item_id = p7
//! # review_id = r1
//! 1	locale	locale	NOUN	_	_	0	root	_	_
//! 2	scuro	scuro	ADJ	_	_	1	amod	_	_
//! ```
//!
//! Metadata is sticky: once declared it applies to every following
//! sentence until redeclared, so a multi-sentence review needs the
//! comments only once. The first sentence of a file must be preceded by
//! both comments.
//!
//! Only id, form, lemma, upos, head and deprel are interpreted; the other
//! four columns ride along untouched so a corpus can be re-serialized.
//! Multiword-token ranges (`3-4`) and empty nodes (`5.1`) are skipped.

// The example above shows a tab-separated format; the tabs are the point.
#![allow(clippy::tabs_in_doc_comments)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{Error, Result};

/// One syntactic token of a parsed sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepToken {
    /// 1-based position within the sentence.
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    /// Opaque XPOS column, preserved for round-tripping.
    pub xpos: String,
    /// Opaque FEATS column.
    pub feats: String,
    /// Id of the syntactic head; 0 marks the root.
    pub head: usize,
    pub deprel: String,
    /// Opaque DEPS column.
    pub deps: String,
    /// Opaque MISC column.
    pub misc: String,
}

/// A validated dependency tree for one sentence.
///
/// Construction checks the invariants the extractor relies on: exactly
/// one root, every head resolving to a real token, and full reachability
/// from the root (no cycles).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepTree {
    tokens: Vec<DepToken>,
    children: BTreeMap<usize, Vec<usize>>,
    root: usize,
}

impl DepTree {
    pub fn new(tokens: Vec<DepToken>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::invalid("empty sentence"));
        }
        let ids: BTreeSet<usize> = tokens.iter().map(|t| t.id).collect();
        if ids.len() != tokens.len() {
            return Err(Error::invalid("duplicate token id"));
        }
        let mut children: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut root = None;
        for tok in &tokens {
            if tok.id == 0 {
                return Err(Error::invalid("token id 0 is reserved for the root link"));
            }
            if tok.head == tok.id {
                return Err(Error::invalid(format!("token {} is its own head", tok.id)));
            }
            if tok.head == 0 {
                if root.replace(tok.id).is_some() {
                    return Err(Error::invalid("expected a single root, found several"));
                }
            } else {
                if !ids.contains(&tok.head) {
                    return Err(Error::invalid(format!(
                        "token {} has head {} which does not exist",
                        tok.id, tok.head
                    )));
                }
                children.entry(tok.head).or_default().push(tok.id);
            }
        }
        let root = root
            .ok_or_else(|| Error::invalid("cycle detected: no token has head 0"))?;
        // Reachability from the root covers every token iff there is no cycle.
        let mut seen = BTreeSet::new();
        let mut queue = vec![root];
        while let Some(id) = queue.pop() {
            if seen.insert(id) {
                if let Some(kids) = children.get(&id) {
                    queue.extend(kids.iter().copied());
                }
            }
        }
        if seen.len() != tokens.len() {
            return Err(Error::invalid(
                "cycle detected: some tokens are unreachable from the root",
            ));
        }
        for kids in children.values_mut() {
            kids.sort_unstable();
        }
        Ok(DepTree {
            tokens,
            children,
            root,
        })
    }

    pub fn tokens(&self) -> &[DepToken] {
        &self.tokens
    }

    pub fn token(&self, id: usize) -> Option<&DepToken> {
        self.tokens.iter().find(|t| t.id == id)
    }

    /// Id of the unique token whose head is 0.
    pub fn root(&self) -> usize {
        self.root
    }

    /// Direct dependents of `id`, in surface order.
    pub fn children(&self, id: usize) -> &[usize] {
        self.children.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `node` plus all of its transitive descendants.
    pub fn subtree_ids(&self, node: usize) -> Result<BTreeSet<usize>> {
        Ok(self.descend(node)?.into_keys().collect())
    }

    /// Tree distance (edge count) from `node` to each token in its
    /// subtree, `node` itself included at distance 0.
    pub fn descendant_distances(&self, node: usize) -> Result<BTreeMap<usize, usize>> {
        self.descend(node)
    }

    fn descend(&self, node: usize) -> Result<BTreeMap<usize, usize>> {
        if self.token(node).is_none() {
            return Err(Error::invalid(format!("unknown token id {node}")));
        }
        let mut dist = BTreeMap::new();
        let mut queue = std::collections::VecDeque::from([(node, 0usize)]);
        while let Some((id, d)) = queue.pop_front() {
            dist.insert(id, d);
            for &kid in self.children(id) {
                queue.push_back((kid, d + 1));
            }
        }
        Ok(dist)
    }
}

/// All parsed sentences of one review of one item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewDoc {
    pub item_id: String,
    pub review_id: String,
    pub sentences: Vec<DepTree>,
}

/// Parses CoNLL-U text into review documents grouped by
/// `(item_id, review_id)` and sorted lexicographically by that pair.
pub fn parse_conllu(text: &str) -> Result<Vec<ReviewDoc>> {
    Parser::default().run(text)
}

/// Reads and parses a `.conllu` file, naming the file in any error.
pub fn load_conllu(path: impl AsRef<Path>) -> Result<Vec<ReviewDoc>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_conllu(&text).map_err(|e| match e {
        Error::Format { line, message, .. } => {
            Error::format(path.display().to_string(), line, message)
        }
        other => other,
    })
}

/// Serializes documents back to parseable CoNLL-U text.
pub fn to_conllu(docs: &[ReviewDoc]) -> String {
    let mut out = String::new();
    for doc in docs {
        out += &format!("# item_id = {}\n# review_id = {}\n", doc.item_id, doc.review_id);
        for (i, sent) in doc.sentences.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            for t in sent.tokens() {
                let head = t.head.to_string();
                let cols = [
                    &t.id.to_string(),
                    &t.form,
                    &t.lemma,
                    &t.upos,
                    &t.xpos,
                    &t.feats,
                    &head,
                    &t.deprel,
                    &t.deps,
                    &t.misc,
                ];
                out += &cols.map(String::as_str).join("\t");
                out.push('\n');
            }
        }
        out.push('\n');
    }
    out
}

const FILE: &str = "conllu";

#[derive(Default)]
struct Parser {
    item_id: Option<String>,
    review_id: Option<String>,
    pending: Vec<DepToken>,
    block_start: usize,
    blocks: usize,
    sentences: usize,
    docs: BTreeMap<(String, String), Vec<DepTree>>,
}

impl Parser {
    fn run(mut self, text: &str) -> Result<Vec<ReviewDoc>> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim_end();
            if trimmed.is_empty() {
                self.flush()?;
            } else if let Some(comment) = trimmed.strip_prefix('#') {
                self.comment(comment);
            } else {
                self.token_line(trimmed, line)?;
            }
        }
        self.flush()?;
        Ok(self
            .docs
            .into_iter()
            .map(|((item_id, review_id), sentences)| ReviewDoc {
                item_id,
                review_id,
                sentences,
            })
            .collect())
    }

    fn comment(&mut self, comment: &str) {
        if let Some((key, value)) = comment.split_once('=') {
            let value = value.trim();
            match key.trim() {
                "item_id" if !value.is_empty() => self.item_id = Some(value.to_string()),
                "review_id" if !value.is_empty() => self.review_id = Some(value.to_string()),
                _ => {}
            }
        }
    }

    fn token_line(&mut self, raw: &str, line: usize) -> Result<()> {
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 10 {
            return Err(Error::format(
                FILE,
                line,
                format!("expected 10 tab-separated columns, found {}", fields.len()),
            ));
        }
        // Multiword-token ranges and empty nodes carry no tree structure.
        if fields[0].contains('-') || fields[0].contains('.') {
            return Ok(());
        }
        let id: usize = fields[0]
            .parse()
            .map_err(|_| Error::format(FILE, line, format!("non-integer token id `{}`", fields[0])))?;
        let head: usize = fields[6]
            .parse()
            .map_err(|_| Error::format(FILE, line, format!("non-integer head `{}`", fields[6])))?;
        if self.pending.is_empty() {
            self.block_start = line;
            self.blocks += 1;
        }
        self.pending.push(DepToken {
            id,
            form: fields[1].to_string(),
            lemma: fields[2].to_string(),
            upos: fields[3].to_string(),
            xpos: fields[4].to_string(),
            feats: fields[5].to_string(),
            head,
            deprel: fields[7].to_string(),
            deps: fields[8].to_string(),
            misc: fields[9].to_string(),
        });
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        if self.pending.is_empty() {
            return Ok(());
        }
        self.sentences += 1;
        let (item, review) = match (&self.item_id, &self.review_id) {
            (Some(i), Some(r)) => (i.clone(), r.clone()),
            (None, _) => {
                return Err(Error::format(
                    FILE,
                    self.block_start,
                    format!("block {}: missing `# item_id = ...` metadata", self.blocks),
                ))
            }
            (_, None) => {
                return Err(Error::format(
                    FILE,
                    self.block_start,
                    format!("block {}: missing `# review_id = ...` metadata", self.blocks),
                ))
            }
        };
        let tokens = std::mem::take(&mut self.pending);
        let tree = DepTree::new(tokens).map_err(|e| {
            Error::format(
                FILE,
                self.block_start,
                format!("sentence {}: {e}", self.sentences),
            )
        })?;
        self.docs.entry((item, review)).or_default().push(tree);
        Ok(())
    }
}
