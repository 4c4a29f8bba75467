use crate::graph::Atom;

/// Hydrogens implied for a bracket-free atom, or `None` if the bonds already
/// exceed every allowed valence. `order_sum` counts aromatic bonds as 1.
pub(crate) fn implicit_hydrogens(atom: &Atom, order_sum: u8, has_aromatic_bond: bool) -> Option<u8> {
    let valences = atom.element.organic_valences()?;
    if atom.aromatic && has_aromatic_bond {
        let max = *valences.last()?;
        if order_sum > max {
            return None;
        }
        let base = valences[0] as i16 - order_sum as i16;
        let h = match atom.atomic_number() {
            // the atom gives one electron to the pi system
            5 | 6 | 7 | 15 | 33 => base - 1,
            _ => base,
        };
        return Some(h.max(0) as u8);
    }
    valences.iter().find(|&&v| v >= order_sum).map(|&v| v - order_sum)
}

/// Bracket atoms carry their own hydrogen count; only reject the clearly
/// impossible.
pub(crate) fn bracket_valence_ok(atom: &Atom, order_sum: u8) -> bool {
    match atom.element.bracket_valences(atom.formal_charge) {
        Some(vs) => {
            let used = order_sum as u16 + atom.explicit_h.unwrap_or(0) as u16;
            used <= *vs.last().unwrap() as u16
        }
        None => true,
    }
}
