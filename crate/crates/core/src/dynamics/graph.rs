use super::{loop_of, DynamicsError, Result};
use crate::instance::Instance;
use crate::monad::{Entry, TValue};
use crate::schema::{Arrow, Attribute, Schema};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

/// Graphviz rendering of a loop instance. Atomic and multiset cells give
/// one edge per occurrence; each polynomial term becomes a point node with
/// one outgoing edge per factor, repeated by its coefficient.
pub fn export_dot(inst: &Instance) -> Result<String> {
    let (obj, arrow) = loop_of(inst)?;
    let kind = inst.tag().kind();
    if !matches!(kind, "atomic" | "multiset" | "poly" | "poly-nc") {
        return Err(DynamicsError::Unsupported(format!("no graph picture for monad `{}`", inst.tag())));
    }
    let mut nodes: Vec<String> = inst.rows(&obj).map(|x| format!("  {};", quote(x))).collect();
    let mut edges = Vec::new();
    for x in inst.rows(&obj) {
        let Some(cell) = inst.cell(&arrow, x) else { continue };
        match cell {
            TValue::Atomic(y) => edges.push(format!("  {} -> {};", quote(x), quote(y))),
            TValue::Bag(bag) => {
                for (y, n) in bag {
                    for _ in 0..*n {
                        edges.push(format!("  {} -> {};", quote(x), quote(y)));
                    }
                }
            }
            TValue::Poly(p) => {
                let mut i = 0;
                for (mono, coeff) in p {
                    for _ in 0..*coeff {
                        i += 1;
                        let hyper = quote(&format!("{x}#{i}"));
                        nodes.push(format!("  {hyper} [shape=point];"));
                        edges.push(format!("  {} -> {hyper} [arrowhead=none];", quote(x)));
                        for y in mono {
                            edges.push(format!("  {hyper} -> {};", quote(y)));
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    nodes.sort();
    edges.sort();
    let mut out = format!("digraph {} {{\n", quote(&inst.name));
    for line in nodes.iter().chain(&edges) {
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("}\n");
    Ok(out)
}

/// Reads a list-with-labels loop instance as a schema: each row is a
/// table, each list entry a column named `<table>_c<position>`. Ids become
/// foreign keys and labels become datatype attributes.
pub fn instance_to_schema(inst: &Instance) -> Result<Schema> {
    if inst.tag().kind() != "listexc" {
        return Err(DynamicsError::WrongMonad { expected: "listexc".into(), found: inst.tag().to_string() });
    }
    let (obj, arrow) = loop_of(inst)?;
    let objects: Vec<String> = inst.rows(&obj).cloned().collect();
    let (mut arrows, mut attributes) = (Vec::new(), Vec::new());
    for table in &objects {
        let Some(TValue::ListExc(entries)) = inst.cell(&arrow, table) else {
            return Err(DynamicsError::MissingCell(table.clone()));
        };
        for (i, e) in entries.iter().enumerate() {
            let name = format!("{table}_c{}", i + 1);
            match e {
                Entry::Id(dst) => arrows.push(Arrow { name, src: table.clone(), dst: dst.clone() }),
                Entry::Label(datatype) => {
                    attributes.push(Attribute { name, src: table.clone(), datatype: datatype.clone() })
                }
            }
        }
    }
    Ok(Schema::new(&inst.name, objects, arrows, Vec::new(), attributes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn edges(dot: &str) -> Vec<&str> {
        dot.lines().filter(|l| l.contains("->")).map(str::trim).collect()
    }

    #[test]
    fn graph_edges() {
        let dot = export_dot(&fixtures::load("graph")).unwrap();
        assert!(dot.starts_with("digraph \"graph\" {\n"));
        assert_eq!(
            edges(&dot),
            ["\"a\" -> \"b\";", "\"a\" -> \"d\";", "\"b\" -> \"c\";", "\"b\" -> \"c\";", "\"e\" -> \"e\";"]
        );
    }

    #[test]
    fn polynomial_terms_become_point_nodes() {
        let dot = export_dot(&fixtures::load("multigraph")).unwrap();
        assert!(dot.contains("\"y#2\" [shape=point];"));
        assert!(dot.contains("\"y#3\""));
        assert!(!dot.contains("\"z#"));
        let e = edges(&dot);
        assert_eq!(e.iter().filter(|l| l.starts_with("\"x#1\" ->")).count(), 3);
    }

    #[test]
    fn unsupported_monads_are_refused() {
        assert!(matches!(export_dot(&fixtures::load("markov")), Err(DynamicsError::Unsupported(_))));
    }

    #[test]
    fn schema_listing() {
        let s = instance_to_schema(&fixtures::load("schemas_listexc")).unwrap();
        assert_eq!(s.objects(), ["Person", "Address", "City", "Tag"]);
        let text = s.render();
        assert!(text.contains("arrow Person_c1 : Person -> Address\n"));
        assert!(text.contains("attr Person_c2 : Person -> String\n"));
        assert!(text.contains("attr City_c2 : City -> Float\n"));
        assert!(text.contains("Int"));
        assert_eq!(s.arrows_from("Tag").count(), 0);
        assert_eq!(Schema::parse(&text).unwrap(), s);
    }
}
