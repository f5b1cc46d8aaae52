#include "core/sgp4.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "core/errors.hpp"
#include "core/time_utils.hpp"

namespace snapdop::sgp4 {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double deg2rad = std::numbers::pi / 180.0;

}  // namespace

double gstime_from_tut1(double tut1) {
    // The linear term reaches ~1e9 seconds of time; reduce it modulo one day
    // with an exact fmod plus the fma product error so nearby instants keep
    // their full relative phase accuracy.
    constexpr double linear_coefficient = 876600.0 * 3600.0 + 8640184.812866;
    const double linear = linear_coefficient * tut1;
    const double linear_err = std::fma(linear_coefficient, tut1, -linear);
    double temp = std::fmod(linear, 86400.0) + linear_err + 67310.54841 +
                  tut1 * tut1 * (0.093104 - 6.2e-6 * tut1);
    temp = std::fmod(temp * deg2rad / 240.0, two_pi);
    if (temp < 0.0) temp += two_pi;
    return temp;
}

double gstime(double julian_date_ut1) {
    return gstime_from_tut1((julian_date_ut1 - 2451545.0) / 36525.0);
}

Elements initialize(const TleRecord& record) {
    using namespace grav;

    Elements el;
    el.epoch_unix_s = record.epoch_unix_s;
    el.bstar = record.bstar;
    el.ecco = record.eccentricity;
    el.inclo = record.inclination_deg * deg2rad;
    el.nodeo = record.raan_deg * deg2rad;
    el.argpo = record.arg_perigee_deg * deg2rad;
    el.mo = record.mean_anomaly_deg * deg2rad;
    el.no_kozai = record.mean_motion_rev_day * two_pi / 1440.0;

    const double eccsq = el.ecco * el.ecco;
    const double omeosq = 1.0 - eccsq;
    const double rteosq = std::sqrt(omeosq);
    const double cosio = std::cos(el.inclo);
    const double cosio2 = cosio * cosio;
    const double sinio = std::sin(el.inclo);

    // Un-Kozai the mean motion.
    const double ak = std::pow(xke / el.no_kozai, 2.0 / 3.0);
    const double d1 = 0.75 * j2 * (3.0 * cosio2 - 1.0) / (rteosq * omeosq);
    double del = d1 / (ak * ak);
    const double adel =
        ak * (1.0 - del * del - del * (1.0 / 3.0 + 134.0 * del * del / 81.0));
    del = d1 / (adel * adel);
    el.no_unkozai = el.no_kozai / (1.0 + del);

    const double ao = std::pow(xke / el.no_unkozai, 2.0 / 3.0);
    const double po = ao * omeosq;
    const double con42 = 1.0 - 5.0 * cosio2;
    el.con41 = -con42 - cosio2 - cosio2;
    const double posq = po * po;
    const double rp = ao * (1.0 - el.ecco);

    if (two_pi / el.no_unkozai >= 225.0) {
        raise(ErrorCode::DeepSpaceUnsupported,
              "satellite " + std::to_string(record.norad_id) +
                  ": orbital period >= 225 min requires the deep-space model");
    }

    el.a = std::pow(el.no_unkozai * tumin, -2.0 / 3.0);
    el.alta = el.a * (1.0 + el.ecco) - 1.0;
    el.altp = el.a * (1.0 - el.ecco) - 1.0;

    el.isimp = rp < 220.0 / earth_radius_km + 1.0;

    double sfour = 78.0 / earth_radius_km + 1.0;
    const double qzms2ttemp = (120.0 - 78.0) / earth_radius_km;
    double qzms24 = qzms2ttemp * qzms2ttemp * qzms2ttemp * qzms2ttemp;
    const double perige = (rp - 1.0) * earth_radius_km;
    if (perige < 156.0) {
        sfour = perige - 78.0;
        if (perige < 98.0) sfour = 20.0;
        const double qzms24temp = (120.0 - sfour) / earth_radius_km;
        qzms24 = qzms24temp * qzms24temp * qzms24temp * qzms24temp;
        sfour = sfour / earth_radius_km + 1.0;
    }

    const double pinvsq = 1.0 / posq;
    const double tsi = 1.0 / (ao - sfour);
    el.eta = ao * el.ecco * tsi;
    const double etasq = el.eta * el.eta;
    const double eeta = el.ecco * el.eta;
    const double psisq = std::fabs(1.0 - etasq);
    const double coef = qzms24 * std::pow(tsi, 4.0);
    const double coef1 = coef / std::pow(psisq, 3.5);
    const double cc2 =
        coef1 * el.no_unkozai *
        (ao * (1.0 + 1.5 * etasq + eeta * (4.0 + etasq)) +
         0.375 * j2 * tsi / psisq * el.con41 * (8.0 + 3.0 * etasq * (8.0 + etasq)));
    el.cc1 = el.bstar * cc2;
    double cc3 = 0.0;
    if (el.ecco > 1.0e-4) {
        cc3 = -2.0 * coef * tsi * j3oj2 * el.no_unkozai * sinio / el.ecco;
    }
    el.x1mth2 = 1.0 - cosio2;
    el.cc4 = 2.0 * el.no_unkozai * coef1 * ao * omeosq *
             (el.eta * (2.0 + 0.5 * etasq) + el.ecco * (0.5 + 2.0 * etasq) -
              j2 * tsi / (ao * psisq) *
                  (-3.0 * el.con41 * (1.0 - 2.0 * eeta + etasq * (1.5 - 0.5 * eeta)) +
                   0.75 * el.x1mth2 * (2.0 * etasq - eeta * (1.0 + etasq)) *
                       std::cos(2.0 * el.argpo)));
    el.cc5 = 2.0 * coef1 * ao * omeosq *
             (1.0 + 2.75 * (etasq + eeta) + eeta * etasq);

    const double cosio4 = cosio2 * cosio2;
    const double temp1 = 1.5 * j2 * pinvsq * el.no_unkozai;
    const double temp2 = 0.5 * temp1 * j2 * pinvsq;
    const double temp3 = -0.46875 * j4 * pinvsq * pinvsq * el.no_unkozai;
    el.mdot = el.no_unkozai + 0.5 * temp1 * rteosq * el.con41 +
              0.0625 * temp2 * rteosq * (13.0 - 78.0 * cosio2 + 137.0 * cosio4);
    el.argpdot = -0.5 * temp1 * con42 +
                 0.0625 * temp2 * (7.0 - 114.0 * cosio2 + 395.0 * cosio4) +
                 temp3 * (3.0 - 36.0 * cosio2 + 49.0 * cosio4);
    const double xhdot1 = -temp1 * cosio;
    el.nodedot = xhdot1 + (0.5 * temp2 * (4.0 - 19.0 * cosio2) +
                           2.0 * temp3 * (3.0 - 7.0 * cosio2)) *
                              cosio;
    el.omgcof = el.bstar * cc3 * std::cos(el.argpo);
    el.xmcof = 0.0;
    if (el.ecco > 1.0e-4) {
        el.xmcof = -2.0 / 3.0 * coef * el.bstar / eeta;
    }
    el.nodecf = 3.5 * omeosq * xhdot1 * el.cc1;
    el.t2cof = 1.5 * el.cc1;

    // Divide-by-zero guard for inclination close to 180 deg.
    if (std::fabs(cosio + 1.0) > 1.5e-12) {
        el.xlcof = -0.25 * j3oj2 * sinio * (3.0 + 5.0 * cosio) / (1.0 + cosio);
    } else {
        el.xlcof = -0.25 * j3oj2 * sinio * (3.0 + 5.0 * cosio) / 1.5e-12;
    }
    el.aycof = -0.5 * j3oj2 * sinio;

    const double delmotemp = 1.0 + el.eta * std::cos(el.mo);
    el.delmo = delmotemp * delmotemp * delmotemp;
    el.sinmao = std::sin(el.mo);
    el.x7thm1 = 7.0 * cosio2 - 1.0;

    if (!el.isimp) {
        const double cc1sq = el.cc1 * el.cc1;
        el.d2 = 4.0 * ao * tsi * cc1sq;
        const double temp = el.d2 * tsi * el.cc1 / 3.0;
        el.d3 = (17.0 * ao + sfour) * temp;
        el.d4 = 0.5 * temp * ao * tsi * (221.0 * ao + 31.0 * sfour) * el.cc1;
        el.t3cof = el.d2 + 2.0 * cc1sq;
        el.t4cof = 0.25 * (3.0 * el.d3 + el.cc1 * (12.0 * el.d2 + 10.0 * cc1sq));
        el.t5cof = 0.2 * (3.0 * el.d4 + 12.0 * el.cc1 * el.d3 + 6.0 * el.d2 * el.d2 +
                          15.0 * cc1sq * (2.0 * el.d2 + cc1sq));
    }

    // Evaluate at epoch so decayed or sub-orbital element sets fail fast.
    Vec3 r, v;
    propagate(el, 0.0, r, v);
    return el;
}

void propagate(const Elements& el, double tsince_min, Vec3& position_km,
               Vec3& velocity_km_s) {
    using namespace grav;
    const double t = tsince_min;
    const double vkmpersec = earth_radius_km * xke / 60.0;

    // Secular gravity and atmospheric drag.
    const double xmdf = el.mo + el.mdot * t;
    const double argpdf = el.argpo + el.argpdot * t;
    const double nodedf = el.nodeo + el.nodedot * t;
    double argpm = argpdf;
    double mm = xmdf;
    const double t2 = t * t;
    double nodem = nodedf + el.nodecf * t2;
    double tempa = 1.0 - el.cc1 * t;
    double tempe = el.bstar * el.cc4 * t;
    double templ = el.t2cof * t2;

    if (!el.isimp) {
        const double delomg = el.omgcof * t;
        const double delmtemp = 1.0 + el.eta * std::cos(xmdf);
        const double delm = el.xmcof * (delmtemp * delmtemp * delmtemp - el.delmo);
        const double temp = delomg + delm;
        mm = xmdf + temp;
        argpm = argpdf - temp;
        const double t3 = t2 * t;
        const double t4 = t3 * t;
        tempa = tempa - el.d2 * t2 - el.d3 * t3 - el.d4 * t4;
        tempe = tempe + el.bstar * el.cc5 * (std::sin(mm) - el.sinmao);
        templ = templ + el.t3cof * t3 + t4 * (el.t4cof + t * el.t5cof);
    }

    double nm = el.no_unkozai;
    double em = el.ecco;
    const double inclm = el.inclo;
    if (nm <= 0.0) {
        raise(ErrorCode::PropagationDiverged, "mean motion is non-positive");
    }
    const double am = std::pow(xke / nm, 2.0 / 3.0) * tempa * tempa;
    nm = xke / std::pow(am, 1.5);
    em -= tempe;
    if (em >= 1.0 || em < -0.001) {
        raise(ErrorCode::PropagationDiverged,
              "perturbed eccentricity out of range at tsince " + std::to_string(t) +
                  " min (orbit decayed)");
    }
    if (em < 1.0e-6) em = 1.0e-6;
    mm += el.no_unkozai * templ;
    double xlm = mm + argpm + nodem;

    nodem = std::fmod(nodem, two_pi);
    argpm = std::fmod(argpm, two_pi);
    xlm = std::fmod(xlm, two_pi);
    mm = std::fmod(xlm - argpm - nodem, two_pi);

    const double sinim = std::sin(inclm);
    const double cosim = std::cos(inclm);

    // No lunar-solar periodics in the near-Earth model.
    const double ep = em;
    const double xincp = inclm;
    const double argpp = argpm;
    const double nodep = nodem;
    const double mp = mm;
    const double sinip = sinim;
    const double cosip = cosim;

    // Long-period periodics.
    const double axnl = ep * std::cos(argpp);
    double temp = 1.0 / (am * (1.0 - ep * ep));
    const double aynl = ep * std::sin(argpp) + temp * el.aycof;
    const double xl = mp + argpp + nodep + temp * el.xlcof * axnl;

    // Kepler's equation. The stop threshold is tighter than the customary
    // 1e-12 so the position is smooth at the micrometre level; the Newton
    // step converges quadratically, so this costs at most one extra pass.
    const double u = std::fmod(xl - nodep, two_pi);
    double eo1 = u;
    double tem5 = 9999.9;
    int ktr = 1;
    double sineo1 = 0.0, coseo1 = 0.0;
    while (std::fabs(tem5) >= 1.0e-14 && ktr <= 12) {
        sineo1 = std::sin(eo1);
        coseo1 = std::cos(eo1);
        tem5 = 1.0 - coseo1 * axnl - sineo1 * aynl;
        tem5 = (u - aynl * coseo1 + axnl * sineo1 - eo1) / tem5;
        if (std::fabs(tem5) >= 0.95) {
            tem5 = tem5 > 0.0 ? 0.95 : -0.95;
        }
        eo1 += tem5;
        ++ktr;
    }

    // Short-period preliminary quantities.
    const double ecose = axnl * coseo1 + aynl * sineo1;
    const double esine = axnl * sineo1 - aynl * coseo1;
    const double el2 = axnl * axnl + aynl * aynl;
    const double pl = am * (1.0 - el2);
    if (pl < 0.0) {
        raise(ErrorCode::PropagationDiverged,
              "semi-latus rectum went negative at tsince " + std::to_string(t) + " min");
    }

    const double rl = am * (1.0 - ecose);
    const double rdotl = std::sqrt(am) * esine / rl;
    const double rvdotl = std::sqrt(pl) / rl;
    const double betal = std::sqrt(1.0 - el2);
    temp = esine / (1.0 + betal);
    const double sinu = am / rl * (sineo1 - aynl - axnl * temp);
    const double cosu = am / rl * (coseo1 - axnl + aynl * temp);
    double su = std::atan2(sinu, cosu);
    const double sin2u = (cosu + cosu) * sinu;
    const double cos2u = 1.0 - 2.0 * sinu * sinu;
    temp = 1.0 / pl;
    const double temp1 = 0.5 * j2 * temp;
    const double temp2 = temp1 * temp;

    const double mrt = rl * (1.0 - 1.5 * temp2 * betal * el.con41) +
                       0.5 * temp1 * el.x1mth2 * cos2u;
    su -= 0.25 * temp2 * el.x7thm1 * sin2u;
    const double xnode = nodep + 1.5 * temp2 * cosip * sin2u;
    const double xinc = xincp + 1.5 * temp2 * cosip * sinip * cos2u;
    const double mvt = rdotl - nm * temp1 * el.x1mth2 * sin2u / xke;
    const double rvdot = rvdotl + nm * temp1 * (el.x1mth2 * cos2u + 1.5 * el.con41) / xke;

    // Orientation vectors and the final state.
    const double sinsu = std::sin(su);
    const double cossu = std::cos(su);
    const double snod = std::sin(xnode);
    const double cnod = std::cos(xnode);
    const double sini = std::sin(xinc);
    const double cosi = std::cos(xinc);
    const double xmx = -snod * cosi;
    const double xmy = cnod * cosi;
    const double ux = xmx * sinsu + cnod * cossu;
    const double uy = xmy * sinsu + snod * cossu;
    const double uz = sini * sinsu;
    const double vx = xmx * cossu - cnod * sinsu;
    const double vy = xmy * cossu - snod * sinsu;
    const double vz = sini * cossu;

    position_km = Vec3(mrt * ux, mrt * uy, mrt * uz) * earth_radius_km;
    velocity_km_s = Vec3(mvt * ux + rvdot * vx, mvt * uy + rvdot * vy,
                         mvt * uz + rvdot * vz) *
                    vkmpersec;

    if (mrt < 1.0) {
        raise(ErrorCode::PropagationDiverged,
              "satellite has decayed (radius below Earth surface) at tsince " +
                  std::to_string(t) + " min");
    }
}

}  // namespace snapdop::sgp4
