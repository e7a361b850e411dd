//! Ontology model: class hierarchy, property ranges, disjointness and the
//! Wikidata ↔ DBpedia schema equivalences, read from a line-oriented file.
//!
//! ```text
//! # comment
//! class dbo:Person subClassOf dbo:Agent
//! subclass dbo:Agent owl:Thing
//! range dbo:spouse object dbo:Person
//! range dbo:birthDate literal xsd:date
//! disjoint dbo:Person dbo:Place
//! equivprop P26 dbo:spouse
//! equivclass Q5 dbo:Person
//! ```
//!
//! Terms are `<absolute IRI>`, a CURIE with a built-in prefix, or a bare
//! name in the DBpedia ontology namespace.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use log::warn;
use thiserror::Error;

use crate::dump_reader::{EntityId, EntityKind};
use crate::rdf::{expand_curie, has_http_scheme, vocab, Iri};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RangeSpec {
    ObjectRange(Iri),
    LiteralRange(Iri),
    Unconstrained,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EquivalenceMap {
    pub property_equiv: HashMap<EntityId, Iri>,
    pub class_equiv: HashMap<EntityId, Iri>,
}

impl EquivalenceMap {
    pub fn equivalent_property_for(&self, p: EntityId) -> Option<&Iri> {
        self.property_equiv.get(&p)
    }

    pub fn equivalent_class_for(&self, q: EntityId) -> Option<&Iri> {
        self.class_equiv.get(&q)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    pub classes: BTreeSet<Iri>,
    pub subclass_edges: BTreeSet<(Iri, Iri)>,
    pub property_ranges: HashMap<Iri, RangeSpec>,
    /// Unordered pairs stored as `(min, max)`.
    pub disjoint_pairs: BTreeSet<(Iri, Iri)>,
    pub equivalences: EquivalenceMap,
    /// Precomputed strict superclasses, lexicographically ordered.
    ancestors: HashMap<Iri, Vec<Iri>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OntologyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("subclass hierarchy is cyclic (involves {0})")]
    CyclicHierarchy(Iri),
}

pub fn resolve_term(token: &str) -> Result<Iri, String> {
    if let Some(inner) = token.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        if has_http_scheme(inner) || inner.contains(':') {
            return Ok(Iri::new(inner));
        }
        return Err(format!("{token} is not an absolute IRI"));
    }
    if has_http_scheme(token) {
        return Ok(Iri::new(token));
    }
    if let Some((prefix, _)) = token.split_once(':') {
        return expand_curie(token)
            .map(Iri::new)
            .ok_or_else(|| format!("unknown prefix {prefix:?}"));
    }
    if token.is_empty() {
        return Err("empty term".into());
    }
    Ok(Iri::new(format!("{}{token}", vocab::DBO)))
}

fn ordered_pair(a: Iri, b: Iri) -> (Iri, Iri) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn load_ontology(source: &str) -> Result<Ontology, OntologyError> {
    let mut o = Ontology::default();
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment_outside_iri(raw);
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let err = |message: String| OntologyError::Parse { line, message };
        let term = |t: &str| resolve_term(t).map_err(err);
        let arity = |n: usize| {
            if tokens.len() == n {
                Ok(())
            } else {
                Err(err(format!(
                    "`{}` expects {} arguments, found {}",
                    tokens[0],
                    n - 1,
                    tokens.len() - 1
                )))
            }
        };
        match tokens[0] {
            "class" => match tokens.len() {
                2 => {
                    o.classes.insert(term(tokens[1])?);
                }
                4 if tokens[2] == "subClassOf" => {
                    let child = term(tokens[1])?;
                    let parent = term(tokens[3])?;
                    o.add_edge(child, parent);
                }
                _ => return Err(err("expected `class <IRI> [subClassOf <IRI>]`".into())),
            },
            "subclass" => {
                arity(3)?;
                let child = term(tokens[1])?;
                let parent = term(tokens[2])?;
                o.add_edge(child, parent);
            }
            "range" => {
                arity(4)?;
                let property = term(tokens[1])?;
                let target = term(tokens[3])?;
                let spec = match tokens[2] {
                    "literal" => RangeSpec::LiteralRange(target),
                    "object" => {
                        o.classes.insert(target.clone());
                        RangeSpec::ObjectRange(target)
                    }
                    other => return Err(err(format!("range kind must be literal or object, got {other:?}"))),
                };
                if o.property_ranges.insert(property.clone(), spec).is_some() {
                    warn!("line {line}: range of {property} redeclared; keeping the last one");
                }
            }
            "disjoint" => {
                arity(3)?;
                let a = term(tokens[1])?;
                let b = term(tokens[2])?;
                o.classes.insert(a.clone());
                o.classes.insert(b.clone());
                o.disjoint_pairs.insert(ordered_pair(a, b));
            }
            "equivprop" => {
                arity(3)?;
                let id: EntityId = tokens[1].parse().map_err(|e| err(format!("{e}")))?;
                if id.kind != EntityKind::Property {
                    return Err(err(format!("{id} is not a property id")));
                }
                let iri = term(tokens[2])?;
                if let Some(existing) = o.equivalences.property_equiv.get(&id) {
                    warn!("line {line}: {id} already equivalent to {existing}; ignoring {iri}");
                } else {
                    o.equivalences.property_equiv.insert(id, iri);
                }
            }
            "equivclass" => {
                arity(3)?;
                let id: EntityId = tokens[1].parse().map_err(|e| err(format!("{e}")))?;
                if id.kind != EntityKind::Item {
                    return Err(err(format!("{id} is not an item id")));
                }
                let iri = term(tokens[2])?;
                if let Some(existing) = o.equivalences.class_equiv.get(&id) {
                    warn!("line {line}: {id} already equivalent to {existing}; ignoring {iri}");
                } else {
                    o.classes.insert(iri.clone());
                    o.equivalences.class_equiv.insert(id, iri);
                }
            }
            other => return Err(err(format!("unknown declaration {other:?}"))),
        }
    }
    o.compute_ancestors()?;
    Ok(o)
}

/// `#` starts a comment unless it sits inside `<...>`.
fn strip_comment_outside_iri(raw: &str) -> &str {
    let mut in_iri = false;
    for (i, c) in raw.char_indices() {
        match c {
            '<' => in_iri = true,
            '>' => in_iri = false,
            '#' if !in_iri => return &raw[..i],
            _ => {}
        }
    }
    raw
}

impl Ontology {
    fn add_edge(&mut self, child: Iri, parent: Iri) {
        self.classes.insert(child.clone());
        self.classes.insert(parent.clone());
        self.subclass_edges.insert((child, parent));
    }

    fn compute_ancestors(&mut self) -> Result<(), OntologyError> {
        let mut parents: BTreeMap<&Iri, Vec<&Iri>> = BTreeMap::new();
        for (c, p) in &self.subclass_edges {
            parents.entry(c).or_default().push(p);
        }

        // Colour-marking DFS for cycle detection.
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        let mut marks: HashMap<&Iri, Mark> = HashMap::new();
        for &start in parents.keys() {
            if marks.contains_key(start) {
                continue;
            }
            let mut stack: Vec<(&Iri, usize)> = vec![(start, 0)];
            marks.insert(start, Mark::Active);
            while let Some((node, next)) = stack.last_mut() {
                let ps = parents.get(*node).map(Vec::as_slice).unwrap_or(&[]);
                if *next < ps.len() {
                    let p = ps[*next];
                    *next += 1;
                    match marks.get(p) {
                        Some(Mark::Active) => return Err(OntologyError::CyclicHierarchy(p.clone())),
                        Some(Mark::Done) => {}
                        None => {
                            marks.insert(p, Mark::Active);
                            stack.push((p, 0));
                        }
                    }
                } else {
                    marks.insert(*node, Mark::Done);
                    stack.pop();
                }
            }
        }

        let mut ancestors = HashMap::new();
        for &class in parents.keys() {
            let mut seen = BTreeSet::new();
            let mut todo: Vec<&Iri> = parents[class].clone();
            while let Some(c) = todo.pop() {
                if seen.insert(c.clone()) {
                    if let Some(ps) = parents.get(c) {
                        todo.extend(ps.iter().copied());
                    }
                }
            }
            ancestors.insert(class.clone(), seen.into_iter().collect());
        }
        self.ancestors = ancestors;
        Ok(())
    }

    /// Strict superclasses of `class`, lexicographically ordered. Unknown
    /// classes have none.
    pub fn superclasses_of(&self, class: &Iri) -> &[Iri] {
        self.ancestors.get(class).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn range_of(&self, property: &Iri) -> &RangeSpec {
        self.property_ranges
            .get(property)
            .unwrap_or(&RangeSpec::Unconstrained)
    }

    /// True iff some superclass-or-self of `a` and of `b` are declared
    /// disjoint.
    pub fn are_disjoint(&self, a: &Iri, b: &Iri) -> bool {
        if self.disjoint_pairs.is_empty() {
            return false;
        }
        let lhs = std::iter::once(a).chain(self.superclasses_of(a));
        for x in lhs {
            let rhs = std::iter::once(b).chain(self.superclasses_of(b));
            for y in rhs {
                if self.disjoint_pairs.contains(&ordered_pair(x.clone(), y.clone())) {
                    return true;
                }
            }
        }
        false
    }

    pub fn equivalent_property_for(&self, p: EntityId) -> Option<&Iri> {
        self.equivalences.equivalent_property_for(p)
    }

    pub fn equivalent_class_for(&self, q: EntityId) -> Option<&Iri> {
        self.equivalences.equivalent_class_for(q)
    }
}
