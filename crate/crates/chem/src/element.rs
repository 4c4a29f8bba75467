//! Periodic table data for the elements the parser accepts.

/// Static per-element data. Masses are standard atomic weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub symbol: &'static str,
    pub number: u8,
    pub mass: f64,
    pub outer_electrons: u8,
    /// Covalent radius (Angstrom), used by the Hall-Kier alpha fallback.
    pub covalent_radius: f64,
}

static ELEMENTS: &[Element] = &[
    Element { symbol: "H", number: 1, mass: 1.008, outer_electrons: 1, covalent_radius: 0.33 },
    Element { symbol: "He", number: 2, mass: 4.003, outer_electrons: 2, covalent_radius: 0.7 },
    Element { symbol: "Li", number: 3, mass: 6.941, outer_electrons: 1, covalent_radius: 1.23 },
    Element { symbol: "Be", number: 4, mass: 9.012, outer_electrons: 2, covalent_radius: 0.9 },
    Element { symbol: "B", number: 5, mass: 10.812, outer_electrons: 3, covalent_radius: 0.82 },
    Element { symbol: "C", number: 6, mass: 12.011, outer_electrons: 4, covalent_radius: 0.77 },
    Element { symbol: "N", number: 7, mass: 14.007, outer_electrons: 5, covalent_radius: 0.7 },
    Element { symbol: "O", number: 8, mass: 15.999, outer_electrons: 6, covalent_radius: 0.66 },
    Element { symbol: "F", number: 9, mass: 18.998, outer_electrons: 7, covalent_radius: 0.611 },
    Element { symbol: "Ne", number: 10, mass: 20.18, outer_electrons: 8, covalent_radius: 0.7 },
    Element { symbol: "Na", number: 11, mass: 22.99, outer_electrons: 1, covalent_radius: 1.54 },
    Element { symbol: "Mg", number: 12, mass: 24.305, outer_electrons: 2, covalent_radius: 1.36 },
    Element { symbol: "Al", number: 13, mass: 26.982, outer_electrons: 3, covalent_radius: 1.18 },
    Element { symbol: "Si", number: 14, mass: 28.086, outer_electrons: 4, covalent_radius: 0.937 },
    Element { symbol: "P", number: 15, mass: 30.974, outer_electrons: 5, covalent_radius: 0.89 },
    Element { symbol: "S", number: 16, mass: 32.067, outer_electrons: 6, covalent_radius: 1.04 },
    Element { symbol: "Cl", number: 17, mass: 35.453, outer_electrons: 7, covalent_radius: 0.997 },
    Element { symbol: "Ar", number: 18, mass: 39.948, outer_electrons: 8, covalent_radius: 1.74 },
    Element { symbol: "K", number: 19, mass: 39.098, outer_electrons: 1, covalent_radius: 2.03 },
    Element { symbol: "Ca", number: 20, mass: 40.078, outer_electrons: 2, covalent_radius: 1.74 },
    Element { symbol: "Sc", number: 21, mass: 44.956, outer_electrons: 3, covalent_radius: 1.44 },
    Element { symbol: "Ti", number: 22, mass: 47.867, outer_electrons: 4, covalent_radius: 1.32 },
    Element { symbol: "V", number: 23, mass: 50.944, outer_electrons: 5, covalent_radius: 1.22 },
    Element { symbol: "Cr", number: 24, mass: 51.996, outer_electrons: 6, covalent_radius: 1.18 },
    Element { symbol: "Mn", number: 25, mass: 54.938, outer_electrons: 7, covalent_radius: 1.17 },
    Element { symbol: "Fe", number: 26, mass: 55.845, outer_electrons: 8, covalent_radius: 1.17 },
    Element { symbol: "Co", number: 27, mass: 58.933, outer_electrons: 9, covalent_radius: 1.16 },
    Element { symbol: "Ni", number: 28, mass: 58.693, outer_electrons: 10, covalent_radius: 1.15 },
    Element { symbol: "Cu", number: 29, mass: 63.546, outer_electrons: 11, covalent_radius: 1.17 },
    Element { symbol: "Zn", number: 30, mass: 65.39, outer_electrons: 2, covalent_radius: 1.25 },
    Element { symbol: "Ga", number: 31, mass: 69.723, outer_electrons: 3, covalent_radius: 1.26 },
    Element { symbol: "Ge", number: 32, mass: 72.61, outer_electrons: 4, covalent_radius: 1.188 },
    Element { symbol: "As", number: 33, mass: 74.922, outer_electrons: 5, covalent_radius: 1.2 },
    Element { symbol: "Se", number: 34, mass: 78.96, outer_electrons: 6, covalent_radius: 1.17 },
    Element { symbol: "Br", number: 35, mass: 79.904, outer_electrons: 7, covalent_radius: 1.167 },
    Element { symbol: "Kr", number: 36, mass: 83.8, outer_electrons: 8, covalent_radius: 1.91 },
    Element { symbol: "Rb", number: 37, mass: 85.468, outer_electrons: 1, covalent_radius: 2.16 },
    Element { symbol: "Sr", number: 38, mass: 87.62, outer_electrons: 2, covalent_radius: 1.91 },
    Element { symbol: "Y", number: 39, mass: 88.906, outer_electrons: 3, covalent_radius: 1.62 },
    Element { symbol: "Zr", number: 40, mass: 91.224, outer_electrons: 4, covalent_radius: 1.45 },
    Element { symbol: "Nb", number: 41, mass: 92.906, outer_electrons: 5, covalent_radius: 1.34 },
    Element { symbol: "Mo", number: 42, mass: 95.94, outer_electrons: 6, covalent_radius: 1.3 },
    Element { symbol: "Tc", number: 43, mass: 98.0, outer_electrons: 7, covalent_radius: 1.27 },
    Element { symbol: "Ru", number: 44, mass: 101.07, outer_electrons: 8, covalent_radius: 1.25 },
    Element { symbol: "Rh", number: 45, mass: 102.906, outer_electrons: 9, covalent_radius: 1.25 },
    Element { symbol: "Pd", number: 46, mass: 106.42, outer_electrons: 10, covalent_radius: 1.28 },
    Element { symbol: "Ag", number: 47, mass: 107.868, outer_electrons: 11, covalent_radius: 1.34 },
    Element { symbol: "Cd", number: 48, mass: 112.412, outer_electrons: 2, covalent_radius: 1.48 },
    Element { symbol: "In", number: 49, mass: 114.818, outer_electrons: 3, covalent_radius: 1.44 },
    Element { symbol: "Sn", number: 50, mass: 118.711, outer_electrons: 4, covalent_radius: 1.385 },
    Element { symbol: "Sb", number: 51, mass: 121.76, outer_electrons: 5, covalent_radius: 1.4 },
    Element { symbol: "Te", number: 52, mass: 127.6, outer_electrons: 6, covalent_radius: 1.378 },
    Element { symbol: "I", number: 53, mass: 126.904, outer_electrons: 7, covalent_radius: 1.387 },
    Element { symbol: "Xe", number: 54, mass: 131.29, outer_electrons: 8, covalent_radius: 1.98 },
    Element { symbol: "Cs", number: 55, mass: 132.905, outer_electrons: 1, covalent_radius: 2.35 },
    Element { symbol: "Ba", number: 56, mass: 137.328, outer_electrons: 2, covalent_radius: 1.98 },
    Element { symbol: "Pt", number: 78, mass: 195.078, outer_electrons: 10, covalent_radius: 1.3 },
    Element { symbol: "Au", number: 79, mass: 196.967, outer_electrons: 11, covalent_radius: 1.34 },
    Element { symbol: "Hg", number: 80, mass: 200.59, outer_electrons: 2, covalent_radius: 1.49 },
    Element { symbol: "Tl", number: 81, mass: 204.383, outer_electrons: 3, covalent_radius: 1.48 },
    Element { symbol: "Pb", number: 82, mass: 207.2, outer_electrons: 4, covalent_radius: 1.48 },
    Element { symbol: "Bi", number: 83, mass: 208.98, outer_electrons: 5, covalent_radius: 1.45 },
];

/// (atomic number, mass number, isotope mass)
static ISOTOPES: &[(u8, u16, f64)] = &[
    (1, 2, 2.014101778),
    (1, 3, 3.016049278),
    (6, 11, 11.0114336),
    (6, 13, 13.00335484),
    (6, 14, 14.00324199),
    (7, 15, 15.0001089),
    (8, 17, 16.9991317),
    (8, 18, 17.999161),
    (9, 18, 18.000938),
    (15, 32, 31.97390727),
    (16, 34, 33.9678669),
    (16, 35, 34.96903216),
    (17, 36, 35.96830698),
    (17, 37, 36.96590259),
    (35, 79, 78.9183371),
    (35, 81, 80.9162906),
    (53, 123, 122.905589),
    (53, 125, 124.9046302),
    (53, 131, 130.9061246),
];

impl Element {
    pub fn by_symbol(symbol: &str) -> Option<&'static Element> {
        ELEMENTS.iter().find(|e| e.symbol == symbol)
    }

    pub fn by_number(number: u8) -> Option<&'static Element> {
        ELEMENTS.iter().find(|e| e.number == number)
    }

    /// Mass of a specific isotope, falling back to the average weight for
    /// isotopes outside the table.
    pub fn isotope_mass(&self, mass_number: u16) -> f64 {
        ISOTOPES
            .iter()
            .find(|(z, a, _)| *z == self.number && *a == mass_number)
            .map_or(self.mass, |&(_, _, m)| m)
    }

    /// Allowed valences for atoms written without brackets.
    pub fn organic_valences(&self) -> Option<&'static [u8]> {
        Some(match self.number {
            5 => &[3],
            6 => &[4],
            7 => &[3, 5],
            8 => &[2],
            15 => &[3, 5],
            16 => &[2, 4, 6],
            9 | 17 | 35 | 53 => &[1],
            _ => return None,
        })
    }

    /// Valences used to sanity-check bracket atoms. Charged main-group atoms
    /// take the valences of their isoelectronic neutral neighbour.
    pub fn bracket_valences(&self, charge: i8) -> Option<&'static [u8]> {
        let z = self.number as i16 - charge as i16;
        let main_group: &[u8] = match z {
            1 => &[1],
            5 => &[3],
            6 => &[4],
            7 => &[3, 5],
            8 => &[2],
            9 => &[1],
            13 => &[3],
            14 => &[4],
            15 => &[3, 5, 7],
            16 => &[2, 4, 6],
            17 => &[1, 3, 5, 7],
            33 => &[3, 5, 7],
            34 => &[2, 4, 6],
            35 => &[1, 3, 5, 7],
            53 => &[1, 3, 5, 7],
            _ => return None,
        };
        match self.number {
            1 | 5..=9 | 13..=17 | 33..=35 | 53 => Some(main_group),
            _ => None,
        }
    }

    pub fn is_halogen(&self) -> bool {
        matches!(self.number, 9 | 17 | 35 | 53)
    }

    /// Elements that may be written in lower case (aromatic).
    pub fn can_be_aromatic(&self) -> bool {
        matches!(self.number, 5 | 6 | 7 | 8 | 15 | 16 | 33 | 34)
    }
}

pub const HYDROGEN_MASS: f64 = 1.008;
