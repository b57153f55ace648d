use serde_json::{json, Value};

use qst::protocols::{export_catalog, protocol_by_id, ProtocolSpec};

use crate::output::{Format, Header};
use crate::CliError;

const DEFAULT_PROTOCOLS: [&str; 7] = ["1", "2", "3", "4", "5", "6", "7"];

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Comma-separated protocol ids; defaults to Protocols 1-7 in table order.
    #[arg(long, value_delimiter = ',')]
    pub protocols: Vec<String>,
}

/// The catalog is always JSON; a `generator` block records the header.
pub fn run(args: Args, format: Format) -> Result<String, CliError> {
    if format == Format::Csv {
        return Err(CliError::Usage("export-protocols writes a JSON catalog; CSV is not available".into()));
    }
    let ids: Vec<String> = if args.protocols.is_empty() {
        DEFAULT_PROTOCOLS.iter().map(|s| s.to_string()).collect()
    } else {
        args.protocols.clone()
    };
    let specs: Vec<ProtocolSpec> = ids.iter().map(|id| protocol_by_id(id)).collect::<qst::Result<_>>()?;
    let catalog = export_catalog(&specs)?;
    let mut doc: Value = serde_json::from_str(&catalog).map_err(|e| CliError::Io(e.to_string()))?;
    let header = Header::new("export-protocols", json!({ "protocols": ids }), None);
    if let Value::Object(map) = &mut doc {
        map.insert("generator".into(), json!(header));
    }
    let mut out = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
    out.push('\n');
    Ok(out)
}
