use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::{Attachment, Library, PropertyKind};
use crate::elicitor::NeedSet;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyRow {
    pub property: PropertyKind,
    pub direct: usize,
    pub indirect: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairRow {
    pub constructor: String,
    pub property: PropertyKind,
    pub direct: usize,
    pub indirect: usize,
}

/// Item counts per property and per attachment. Counts are distinct items;
/// every item of the library counts, whatever its role.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UsageReport {
    pub corpus: String,
    pub tool_version: String,
    /// All nine properties, in declaration order.
    pub properties: Vec<PropertyRow>,
    /// Every attachment of the library, by constructor id then property.
    pub pairs: Vec<PairRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

fn count(sets: &BTreeMap<String, NeedSet>, pred: impl Fn(&Attachment) -> bool) -> usize {
    sets.values().filter(|n| n.pairs.iter().any(&pred)).count()
}

pub fn property_usage_table(
    lib: &Library,
    direct: &BTreeMap<String, NeedSet>,
    indirect: &BTreeMap<String, NeedSet>,
    corpus: &str,
) -> UsageReport {
    let properties = PropertyKind::ALL
        .into_iter()
        .map(|p| PropertyRow {
            property: p,
            direct: count(direct, |a| a.property == p),
            indirect: count(indirect, |a| a.property == p),
        })
        .collect();
    let mut attachments: Vec<&Attachment> = lib.environment.iter().collect();
    attachments.sort_by(|a, b| (&a.constructor, a.property).cmp(&(&b.constructor, b.property)));
    let pairs = attachments
        .into_iter()
        .map(|att| PairRow {
            constructor: att.constructor.clone(),
            property: att.property,
            direct: count(direct, |a| a == att),
            indirect: count(indirect, |a| a == att),
        })
        .collect();
    UsageReport { corpus: corpus.to_string(), tool_version: TOOL_VERSION.to_string(), properties, pairs }
}

/// TSV carries the per-property table only; JSON carries the whole report
/// with keys in field order. Both end with a newline.
pub fn emit(report: &UsageReport, format: Format) -> Vec<u8> {
    match format {
        Format::Tsv => {
            let mut out = String::from("property\tdirect\tindirect\n");
            for row in &report.properties {
                out.push_str(&format!("{}\t{}\t{}\n", row.property, row.direct, row.indirect));
            }
            out.into_bytes()
        }
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elicitor::NeedMode;
    use crate::frontend::parse_library;

    fn needs(mode: NeedMode, entries: &[(&str, &[(&str, PropertyKind)])]) -> BTreeMap<String, NeedSet> {
        entries
            .iter()
            .map(|(id, pairs)| {
                let mut n = NeedSet::new(*id, mode);
                n.pairs.extend(pairs.iter().map(|(c, p)| Attachment::new(*c, *p)));
                (id.to_string(), n)
            })
            .collect()
    }

    #[test]
    fn empty_library_tsv() {
        let r = property_usage_table(&Library::default(), &BTreeMap::new(), &BTreeMap::new(), "empty");
        let tsv = String::from_utf8(emit(&r, Format::Tsv)).unwrap();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines.len(), 10);
        assert_eq!(lines[0], "property\tdirect\tindirect");
        assert_eq!(lines[1], "reflexivity\t0\t0");
        assert_eq!(lines[9], "commutativity\t0\t0");
        assert!(tsv.ends_with('\n'));
    }

    #[test]
    fn emission_is_deterministic() {
        let r = property_usage_table(&Library::default(), &BTreeMap::new(), &BTreeMap::new(), "empty");
        assert_eq!(emit(&r, Format::Json), emit(&r, Format::Json));
        assert_eq!(emit(&r, Format::Tsv), emit(&r, Format::Tsv));
    }

    #[test]
    fn counts_distinct_items() {
        use PropertyKind::*;
        let lib = parse_library(
            "(constructor R :kind relation :arity 2)(constructor S :kind relation :arity 2)\
             (attach R irreflexivity)(attach S irreflexivity)(attach S symmetry)",
        )
        .unwrap();
        let direct = needs(
            NeedMode::Direct,
            &[("x", &[("R", Irreflexivity), ("S", Irreflexivity)]), ("y", &[]), ("z", &[])],
        );
        let indirect = needs(
            NeedMode::Indirect,
            &[("x", &[("R", Irreflexivity), ("S", Irreflexivity)]), ("y", &[("R", Irreflexivity)]), ("z", &[])],
        );
        let r = property_usage_table(&lib, &direct, &indirect, "t");
        let irr = &r.properties[4];
        assert_eq!((irr.property, irr.direct, irr.indirect), (Irreflexivity, 1, 2));
        let sym = &r.properties[1];
        assert_eq!((sym.direct, sym.indirect), (0, 0));
        let rows: Vec<(String, PropertyKind, usize, usize)> =
            r.pairs.iter().map(|p| (p.constructor.clone(), p.property, p.direct, p.indirect)).collect();
        assert_eq!(
            rows,
            [
                ("R".into(), Irreflexivity, 1, 2),
                ("S".into(), Symmetry, 0, 0),
                ("S".into(), Irreflexivity, 1, 1),
            ]
        );
    }

    #[test]
    fn json_key_order() {
        let r = property_usage_table(&Library::default(), &BTreeMap::new(), &BTreeMap::new(), "e");
        let json = String::from_utf8(emit(&r, Format::Json)).unwrap();
        let pos = |k: &str| json.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("corpus") < pos("tool_version"));
        assert!(pos("tool_version") < pos("properties"));
        assert!(pos("properties") < pos("pairs"));
        assert!(json.ends_with("}\n"));
    }
}
