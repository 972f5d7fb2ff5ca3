//! Calibration records stored next to the configuration, named by the
//! physics fingerprint of the model they were fitted on.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::search::CalibrationResult;

pub fn sidecar_path(dir: &Path, fingerprint: &str) -> PathBuf {
    dir.join(format!("calibration-{fingerprint}.toml"))
}

pub fn write_sidecar(dir: &Path, result: &CalibrationResult) -> Result<PathBuf> {
    let path = sidecar_path(dir, &result.fingerprint);
    let text = toml::to_string(result)
        .map_err(|e| Error::InvalidInput(format!("cannot serialise calibration: {e}")))?;
    std::fs::write(&path, text)
        .map_err(|e| Error::io(format!("cannot write {}", path.display()), e))?;
    Ok(path)
}

/// `None` when no record exists for `fingerprint`.
pub fn read_sidecar(dir: &Path, fingerprint: &str) -> Result<Option<CalibrationResult>> {
    let path = sidecar_path(dir, fingerprint);
    let text = match std::fs::read_to_string(&path) {
        Ok(text) => text,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::io(format!("cannot read {}", path.display()), e)),
    };
    let record: CalibrationResult = toml::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: 1,
        column: 1,
        message: e.message().trim().to_string(),
    })?;
    if record.fingerprint != fingerprint {
        return Err(Error::InvalidInput(format!(
            "{} belongs to model {}, not {fingerprint}",
            path.display(),
            record.fingerprint
        )));
    }
    Ok(Some(record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TorqueModel;
    use crate::search::calibrate_against_published;

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let result = calibrate_against_published(&TorqueModel::table_defaults()).unwrap();
        let path = write_sidecar(dir.path(), &result).unwrap();
        assert!(path
            .file_name()
            .unwrap()
            .to_str()
            .unwrap()
            .contains(&result.fingerprint));
        let back = read_sidecar(dir.path(), &result.fingerprint)
            .unwrap()
            .unwrap();
        assert_eq!(back, result);
        assert_eq!(back.lambda_star.to_bits(), result.lambda_star.to_bits());
        assert!(read_sidecar(dir.path(), "0000").unwrap().is_none());
    }
}
