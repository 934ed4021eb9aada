//! Civil date arithmetic for building season calendars.

use geist_core::date::Date;

/// Days since 1970-01-01 (Howard Hinnant's civil-from-days algorithm,
/// inverted).
pub fn to_days(date: Date) -> i64 {
    let y = if date.month <= 2 { date.year - 1 } else { date.year } as i64;
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let m = date.month as i64;
    let d = date.day as i64;
    let doy = (153 * (if m > 2 { m - 3 } else { m + 9 }) + 2) / 5 + d - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146097 + doe - 719468
}

pub fn from_days(days: i64) -> Date {
    let z = days + 719468;
    let era = if z >= 0 { z } else { z - 146096 } / 146097;
    let doe = z - era * 146097;
    let yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u8;
    let m = (if mp < 10 { mp + 3 } else { mp - 9 }) as u8;
    let year = (if m <= 2 { y + 1 } else { y }) as i32;
    Date::new(year, m, d).expect("valid computed date")
}

pub fn add_days(date: Date, delta: i64) -> Date {
    from_days(to_days(date) + delta)
}

/// 0 = Monday ... 6 = Sunday.
pub fn weekday(date: Date) -> u8 {
    ((to_days(date) % 7 + 10) % 7) as u8
}

/// First Friday on or after the given date.
pub fn first_friday_on_or_after(date: Date) -> Date {
    let wd = weekday(date) as i64;
    let friday = 4i64;
    add_days(date, (friday - wd + 7) % 7)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_weekdays() {
        let d = Date::new(2020, 3, 11).unwrap();
        assert_eq!(from_days(to_days(d)), d);
        // 2020-03-11 was a Wednesday
        assert_eq!(weekday(d), 2);
        // 2020-05-16 was a Saturday
        assert_eq!(weekday(Date::new(2020, 5, 16).unwrap()), 5);
        let f = first_friday_on_or_after(Date::new(2019, 8, 14).unwrap());
        assert_eq!(f, Date::new(2019, 8, 16).unwrap());
    }
}
