//! Structured meshes, barycentric refinement and the ASCII mesh format.

use boussinesq::mesh::{barycentric_refine, generate_unit_square_mesh, load_mesh, write_mesh};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in [2, 4, 8, 16] {
        let coarse = generate_unit_square_mesh(n)?;
        let fine = barycentric_refine(&coarse);
        let (c, f) = (coarse.stats(), fine.stats());
        println!(
            "n={n:<3} {:>5} -> {:>5} triangles, {:>4} -> {:>5} vertices, h_max {:.4} -> {:.4}, area {} -> {}",
            c.triangles, f.triangles, c.vertices, f.vertices, c.max_diameter, f.max_diameter, c.area, f.area
        );
    }

    let mesh = barycentric_refine(&generate_unit_square_mesh(2)?);
    let path = std::env::temp_dir().join("boussinesq_mesh_example.txt");
    write_mesh(&mesh, &path)?;
    let back = load_mesh(&path)?;
    println!("round trip through {}: identical = {}", path.display(), back == mesh);
    Ok(())
}
