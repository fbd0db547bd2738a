//! Phase-plane figures: classical ellipses, the circular orbits with
//! r² = 2N + 1, confocal phase cells and a world-sheet cylinder, written as
//! CSV point sets.

use phasecell::geometry::{
    classical_ellipse, confocal_phase_cells, orbit_circle, worldsheet_cylinder, write_geometry_csv,
    write_summary_csv,
};
use phasecell::oscillator::PhysicalConstants;

fn main() -> phasecell::Result<()> {
    let circles = (0..5).map(|n| orbit_circle(n, 64)).collect::<Result<Vec<_>, _>>()?;
    write_summary_csv(std::io::stdout(), &circles)?;

    let f = PhysicalConstants::fundamental();
    let ground = classical_ellipse(0.5, &f, 64)?;
    println!("E = hv/2 ellipse coincides with the N = 0 orbit: {}", ground.points() == circles[0].points());

    let stretched = PhysicalConstants::explicit(1.0, 1.0, 2.0, 1.0)?;
    for cell in confocal_phase_cells(&[0, 1, 2], &stretched, 64)? {
        let (q, p) = cell.semi_axes();
        println!("cell N = {:?}: semi-axes q = {q:.4}, p = {p:.4}", cell.n().unwrap_or_default());
    }

    let cylinder = worldsheet_cylinder(2, 0.0, 1.0, 32, 5)?;
    let path = std::env::temp_dir().join("phasecell_orbits.csv");
    let file = std::fs::File::create(&path)?;
    write_geometry_csv(file, &[ground, cylinder])?;
    println!("wrote {}", path.display());
    Ok(())
}
