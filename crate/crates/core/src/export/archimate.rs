//! ArchiMate model exchange XML writer.
//!
//! Output is built as a string with fixed two-space indentation, LF line
//! endings, and elements in identifier order, so equal models give
//! byte-equal files. Dummy elements are marked with a boolean property;
//! the property definition is emitted only when at least one dummy exists.

use crate::ids;
use crate::transform::TargetModel;

const NS: &str = "http://www.opengroup.org/xsd/archimate/3.0/";
const NS_XSI: &str = "http://www.w3.org/2001/XMLSchema-instance";
const DUMMY_PROP: &str = "propid-dummy";

fn esc_text(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn esc_attr(s: &str) -> String {
    esc_text(s).replace('"', "&quot;")
}

/// Renders the target model as exchange-format XML.
pub fn to_xml(target: &TargetModel) -> String {
    let elem_ids: Vec<&str> = target.elements.keys().map(String::as_str).collect();
    let rel_ids: Vec<&str> = target.relations.keys().map(String::as_str).collect();
    let model_id = format!(
        "id-{}",
        ids::digest16(&[
            "export-model",
            &target.metamodel,
            &elem_ids.join(","),
            &rel_ids.join(","),
        ])
    );
    let has_dummies = target.dummy_count() > 0;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<model xmlns=\"{NS}\" xmlns:xsi=\"{NS_XSI}\" identifier=\"{}\">\n",
        esc_attr(&model_id)
    ));
    out.push_str("  <name xml:lang=\"en\">Mined EA model</name>\n");

    if target.elements.is_empty() {
        out.push_str("  <elements/>\n");
    } else {
        out.push_str("  <elements>\n");
        for elem in target.elements.values() {
            out.push_str(&format!(
                "    <element identifier=\"{}\" xsi:type=\"{}\">\n",
                esc_attr(&elem.id),
                esc_attr(&elem.type_name)
            ));
            out.push_str(&format!(
                "      <name xml:lang=\"en\">{}</name>\n",
                esc_text(&elem.name)
            ));
            if elem.dummy {
                out.push_str("      <properties>\n");
                out.push_str(&format!(
                    "        <property propertyDefinitionRef=\"{DUMMY_PROP}\">\n"
                ));
                out.push_str("          <value xml:lang=\"en\">true</value>\n");
                out.push_str("        </property>\n");
                out.push_str("      </properties>\n");
            }
            out.push_str("    </element>\n");
        }
        out.push_str("  </elements>\n");
    }

    if target.relations.is_empty() {
        out.push_str("  <relationships/>\n");
    } else {
        out.push_str("  <relationships>\n");
        for rel in target.relations.values() {
            out.push_str(&format!(
                "    <relationship identifier=\"{}\" source=\"{}\" target=\"{}\" xsi:type=\"{}\"/>\n",
                esc_attr(&rel.id),
                esc_attr(&rel.source),
                esc_attr(&rel.target),
                esc_attr(&rel.type_name)
            ));
        }
        out.push_str("  </relationships>\n");
    }

    if has_dummies {
        out.push_str("  <propertyDefinitions>\n");
        out.push_str(&format!(
            "    <propertyDefinition identifier=\"{DUMMY_PROP}\" type=\"boolean\">\n"
        ));
        out.push_str("      <name>dummy</name>\n");
        out.push_str("    </propertyDefinition>\n");
        out.push_str("  </propertyDefinitions>\n");
    }

    out.push_str("</model>\n");
    out
}
