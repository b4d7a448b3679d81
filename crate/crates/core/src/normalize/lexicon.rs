//! A handful of English surfaces with known semantics, so hand-written
//! example documents resolve without spelled-out semantics.

use super::{CalendarValue, Offset, OffsetUnit, PartialValue, Region, TimexSemantics, Weekday};

pub fn demo_lexicon(surface: &str) -> Option<TimexSemantics> {
    let key = surface.trim().to_lowercase();
    let partial = |s: &str| {
        TimexSemantics::Partial(PartialValue::fields(s.parse::<CalendarValue>().expect("lexicon value")))
    };
    let offset = |sign, magnitude, unit| TimexSemantics::Offset(Offset::new(sign, magnitude, unit));
    Some(match key.as_str() {
        "march" => partial("--03"),
        "8:00am" | "8am" | "8:00 am" => partial("T08:00:00"),
        "thursday" => TimexSemantics::Partial(PartialValue::weekday(Weekday::Thu)),
        "next year" => offset(1, 1, OffsetUnit::Year),
        "last year" => offset(-1, 1, OffsetUnit::Year),
        "10 minutes later" => offset(1, 10, OffsetUnit::Minute),
        "once" | "once upon the time" | "once upon a time" => TimexSemantics::Symbolic(Region::Past),
        "recent years" | "nowadays" => TimexSemantics::Symbolic(Region::Present),
        "in the future" | "the future" => TimexSemantics::Symbolic(Region::Future),
        year if year.len() == 4 && year.bytes().all(|b| b.is_ascii_digit()) => {
            TimexSemantics::Absolute(CalendarValue::year(year.parse().ok()?))
        }
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_surfaces() {
        for s in ["2003", "March", "next year", "last year", "Thursday", "8:00am", "10 minutes later", "1918", "1957", "1966", "once"] {
            let sem = demo_lexicon(s).unwrap_or_else(|| panic!("{s}"));
            sem.check().unwrap();
        }
        assert_eq!(demo_lexicon("2003"), Some(TimexSemantics::Absolute(CalendarValue::year(2003))));
        assert_eq!(demo_lexicon("every month"), None);
    }
}
