//! Built-in scenarios reproducing the figure parameter sets.

use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::Scenario;

pub const PRESET_NAMES: [&str; 7] = ["fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig3d", "sm1"];

const DELTA_B_NOTE: &str =
    "Delta_B grid chosen by this implementation: resonant, +-0.4, +-0.8, band edge 1.0, far detuned 5.0";
const DX_NOTE: &str = "separations chosen by this implementation";

fn fig2(name: &str, dx: usize) -> Value {
    json!({
        "name": name,
        "J2": 1.0,
        "VA_over_2J": 0.08,
        "VB_over_2J": 1.8,
        "DeltaA_over_2J": 0.0,
        "DeltaB_over_2J": 0.0,
        "MA": 1,
        "MB": 2,
        "dx": dx,
        "initial": {"type": "single"},
        "t_max": 60.0,
        "dt_out": 0.1,
        "sweep": {"param": "DeltaB_over_2J", "values": [0.0, 0.4, -0.4, 0.8, -0.8, 1.0, 5.0]},
        "solvers": ["oracle", "resolvent", "closed_form"],
        "note": DELTA_B_NOTE
    })
}

/// Scenario document for a named preset.
pub fn preset_value(name: &str) -> Result<Value> {
    let v = match name {
        "fig2a" => fig2("fig2a", 7),
        "fig2b" => fig2("fig2b", 8),
        "fig3a" => json!({
            "name": "fig3a",
            "J2": 1.0,
            "VA_over_2J": 0.09,
            "VB_over_2J": 0.07,
            "DeltaA_over_2J": 0.0,
            "DeltaB_over_2J": 0.0,
            "MA": 1,
            "MB": 2,
            "dx": 1,
            "initial": {"type": "single"},
            "t_max": 60.0,
            "dt_out": 0.1,
            "sweep": {"param": "dx", "values": [1, 2, 3, 4, 5, 6, 7, 8]},
            "solvers": ["oracle", "resolvent"],
            "note": DX_NOTE
        }),
        // sqrt(M_B) V_B = J / 1.13 with 2J = 1.
        "fig3b" => json!({
            "name": "fig3b",
            "J2": 1.0,
            "VA_over_2J": 0.08,
            "VB_over_2J": 0.5 / 1.13 / std::f64::consts::SQRT_2,
            "DeltaA_over_2J": 0.0,
            "DeltaB_over_2J": 0.0,
            "MA": 1,
            "MB": 2,
            "dx": 1,
            "mode": "spectrum",
            "k_points": 1001,
            "solvers": ["oracle"]
        }),
        "fig3c" => json!({
            "name": "fig3c",
            "J2": 1.0,
            "VA_over_2J": 0.08,
            "VB_over_2J": 1.27,
            "DeltaA_over_2J": 0.0,
            "DeltaB_over_2J": 0.0,
            "MA": 2,
            "MB": 2,
            "dx": 1,
            "initial": {"type": "sym_pair"},
            "observable": "total",
            "t_max": 60.0,
            "dt_out": 0.1,
            "sweep": {"param": "dx", "values": [1, 3, 5, 7]},
            "solvers": ["oracle", "resolvent", "closed_form"],
            "note": DX_NOTE
        }),
        "fig3d" => json!({
            "name": "fig3d",
            "J2": 1.0,
            "VA_over_2J": 0.04,
            "VB_over_2J": 1.0,
            "DeltaA_over_2J": 0.0,
            "DeltaB_over_2J": 0.0,
            "MA": 5,
            "MB": 2,
            "dx": 2,
            "initial": {"type": "uniform"},
            "observable": "total",
            "t_max": 400.0,
            "dt_out": 0.5,
            "sweep": {"param": "dx", "values": [1, 2, 3, 4]},
            "solvers": ["oracle"],
            "long_time": true,
            "note": DX_NOTE
        }),
        "sm1" => json!({
            "name": "sm1",
            "J2": 1.0,
            "VA_over_2J": 0.07,
            "VB_over_2J": 1.8,
            "DeltaA_over_2J": 0.0,
            "DeltaB_over_2J": 0.0,
            "MA": 1,
            "MB": 2,
            "dx": 1,
            "initial": {"type": "single"},
            "t_max": 130.0,
            "dt_out": 0.1,
            "sweep": {"param": "dx", "values": [1, 5, 9, 13, 17, 21]},
            "solvers": ["oracle", "resolvent", "closed_form"]
        }),
        other => {
            return Err(Error::Domain(format!("unknown preset {other:?}; expected one of {}", PRESET_NAMES.join(", "))))
        }
    };
    Ok(v)
}

/// Pretty-printed JSON text of a preset, as it would be saved to disk.
pub fn preset_json(name: &str) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&preset_value(name)?)?;
    s.push('\n');
    Ok(s)
}

pub fn preset(name: &str) -> Result<Scenario> {
    Scenario::from_json_str(&preset_json(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        for name in PRESET_NAMES {
            let s = preset(name).unwrap();
            assert_eq!(s.name, name);
        }
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn fig2a_and_fig3d_parameters() {
        let s = preset("fig2a").unwrap();
        let (c, init) = s.base.build().unwrap();
        assert_eq!(c.dx(), 7);
        assert!((c.va_2j() - 0.08).abs() < 1e-15 && (c.vb_2j() - 1.8).abs() < 1e-15);
        assert_eq!((c.emitters.count, c.scatterers.count), (1, 2));
        assert_eq!(c.delta_a(), 0.0);
        assert_eq!(init.excited_count(), 1);
        assert_eq!(s.sweep.as_ref().unwrap().values.len(), 7);

        let s = preset("fig3d").unwrap();
        let (c, init) = s.base.build().unwrap();
        assert!((c.va_2j() - 0.04).abs() < 1e-15 && (c.vb_2j() - 1.0).abs() < 1e-15);
        assert_eq!((c.emitters.count, c.scatterers.count), (5, 2));
        assert_eq!(init.excited_count(), 5);
    }
}
