#include "hidsense/registers.hpp"

#include "hidsense/common.hpp"

#include <algorithm>
#include <array>

namespace hidsense::registers {

namespace {

constexpr bool bit(std::uint8_t value, int n) { return ((value >> n) & 1U) != 0; }

constexpr std::array<int, 8> kAcquisitionTad = {0, 2, 4, 6, 8, 12, 16, 20};

// ADCS2:ADCS0, indexed by the 3-bit field. 011 and 111 both select FRC.
constexpr std::array<ClockDivider, 8> kClockSelect = {
    ClockDivider::Fosc2,  ClockDivider::Fosc8,  ClockDivider::Fosc32,
    ClockDivider::FRC,    ClockDivider::Fosc4,  ClockDivider::Fosc16,
    ClockDivider::Fosc64, ClockDivider::FRC,
};

std::string flag(bool b) { return b ? "1" : "0"; }

}  // namespace

RegisterFile RegisterFile::reference() {
  RegisterFile r;
  r.adcon0 = 0x00;
  r.adcon1 = 0x00;
  r.adcon2 = 0xA6;
  r.t0con = 0xC7;  // 0x47 followed by T0CON.TMR0ON = 1
  r.intcon = 0xE0;
  r.intcon2 = 0xF5;
  r.intcon3 = 0xC0;
  r.trisa = 0xFF;
  r.trisb = 0x00;
  r.tmr0l_reload = 100;
  return r;
}

int Adcon1::analog_count() const {
  return static_cast<int>(std::count(analog.begin(), analog.end(), true));
}

Adcon0 decode_adcon0(std::uint8_t value) {
  Adcon0 out;
  out.channel = (value >> 2) & 0x0F;
  out.go_done = bit(value, 1);
  out.enabled = bit(value, 0);
  out.unimplemented = out.channel >= kAnalogChannels;
  return out;
}

Adcon1 decode_adcon1(std::uint8_t value) {
  Adcon1 out;
  out.vref_minus_external = bit(value, 5);
  out.vref_plus_external = bit(value, 4);
  const int pcfg = value & 0x0F;
  // Rows 0000..0010 are all-analog; from 0011 on each row turns the highest
  // remaining analog channel digital, down to 1111 with none left.
  const int analog = pcfg <= 2 ? kAnalogChannels : 15 - pcfg;
  for (int k = 0; k < kAnalogChannels; ++k) out.analog[k] = k < analog;
  return out;
}

Adcon2 decode_adcon2(std::uint8_t value) {
  Adcon2 out;
  out.right_justified = bit(value, 7);
  out.acquisition_tad = kAcquisitionTad[(value >> 3) & 0x07];
  out.clock_divider = kClockSelect[value & 0x07];
  return out;
}

std::uint8_t encode_adcon2(const Adcon2& fields) {
  const auto tad = std::find(kAcquisitionTad.begin(), kAcquisitionTad.end(),
                             fields.acquisition_tad);
  if (tad == kAcquisitionTad.end()) {
    throw ConfigError("acquisition time " + std::to_string(fields.acquisition_tad) +
                      " TAD is not selectable");
  }
  std::uint8_t adcs = 0;
  if (fields.clock_divider == ClockDivider::FRC) {
    adcs = 0b111;
  } else {
    adcs = static_cast<std::uint8_t>(
        std::find(kClockSelect.begin(), kClockSelect.end(), fields.clock_divider) -
        kClockSelect.begin());
  }
  const auto acqt = static_cast<std::uint8_t>(tad - kAcquisitionTad.begin());
  return static_cast<std::uint8_t>((fields.right_justified ? 0x80 : 0x00) | (acqt << 3) | adcs);
}

T0con decode_t0con(std::uint8_t value) {
  T0con out;
  out.enabled = bit(value, 7);
  out.eight_bit_mode = bit(value, 6);
  out.prescaler_assigned = !bit(value, 3);  // PSA = 1 bypasses the prescaler
  out.prescale = out.prescaler_assigned ? (2 << (value & 0x07)) : 1;
  return out;
}

Intcon decode_intcon(std::uint8_t value) {
  return Intcon{
      .gie = bit(value, 7),
      .peie = bit(value, 6),
      .tmr0ie = bit(value, 5),
      .int0ie = bit(value, 4),
      .rbie = bit(value, 3),
      .tmr0if = bit(value, 2),
      .int0if = bit(value, 1),
      .rbif = bit(value, 0),
  };
}

std::string_view to_string(ClockDivider divider) {
  switch (divider) {
    case ClockDivider::Fosc2: return "Fosc/2";
    case ClockDivider::Fosc4: return "Fosc/4";
    case ClockDivider::Fosc8: return "Fosc/8";
    case ClockDivider::Fosc16: return "Fosc/16";
    case ClockDivider::Fosc32: return "Fosc/32";
    case ClockDivider::Fosc64: return "Fosc/64";
    case ClockDivider::FRC: return "FRC";
  }
  return "?";
}

AdcConfig adc_config(const RegisterFile& regs) {
  const auto a0 = decode_adcon0(regs.adcon0);
  const auto a1 = decode_adcon1(regs.adcon1);
  const auto a2 = decode_adcon2(regs.adcon2);
  AdcConfig out;
  out.channel = a0.channel;
  out.enabled = a0.enabled;
  out.right_justified = a2.right_justified;
  out.acquisition_tad = a2.acquisition_tad;
  out.clock_divider = a2.clock_divider;
  out.vref_plus_external = a1.vref_plus_external;
  out.vref_minus_external = a1.vref_minus_external;
  out.analog_channel_count = a1.analog_count();
  out.an0_analog = a1.analog[0];
  return out;
}

Timer0Config timer0_config(const RegisterFile& regs) {
  const auto t0 = decode_t0con(regs.t0con);
  const auto ic = decode_intcon(regs.intcon);
  return Timer0Config{
      .enabled = t0.enabled,
      .eight_bit_mode = t0.eight_bit_mode,
      .prescale = t0.prescale,
      .reload = regs.tmr0l_reload,
      .overflow_interrupt_enabled = ic.gie && ic.tmr0ie,
  };
}

std::vector<Finding> validate_firmware_config(const RegisterFile& regs) {
  const RegisterFile ref = RegisterFile::reference();
  std::vector<Finding> out;
  auto warn = [&out](std::string msg) { out.push_back({Severity::Warning, std::move(msg)}); };
  auto fatal = [&out](std::string msg) { out.push_back({Severity::Fatal, std::move(msg)}); };

  if (regs.adcon1 != ref.adcon1) {
    if (!decode_adcon1(regs.adcon1).analog[0]) {
      fatal("ADCON1=0x" + hex_byte(regs.adcon1) + ": AN0 is not configured as analog");
    } else {
      warn("ADCON1=0x" + hex_byte(regs.adcon1) + ": expected 0x00 (all analog, Vref=VDD/VSS)");
    }
  }
  if (regs.adcon2 != ref.adcon2) {
    warn("ADCON2=0x" + hex_byte(regs.adcon2) + ": expected 0xA6 (right justified, 8 TAD, Fosc/64)");
  }
  if (regs.trisa != ref.trisa) {
    if ((regs.trisa & 0x01) == 0) {
      fatal("PORTA not configured as input (TRISA=0x" + hex_byte(regs.trisa) + ")");
    } else {
      warn("PORTA not configured as input (TRISA=0x" + hex_byte(regs.trisa) + ")");
    }
  }
  if (regs.trisb != ref.trisb) {
    warn("PORTB not configured as output (TRISB=0x" + hex_byte(regs.trisb) + ")");
  }
  const auto t0 = decode_t0con(regs.t0con);
  if (!t0.enabled) warn("Timer0 is not running (T0CON.TMR0ON=0)");
  if (!t0.eight_bit_mode) warn("Timer0 is in 16-bit mode, expected 8-bit");
  if (t0.prescale != 256) {
    warn("Timer0 prescale is 1:" + std::to_string(t0.prescale) + ", expected 1:256");
  }
  if (regs.intcon != ref.intcon) {
    warn("INTCON=0x" + hex_byte(regs.intcon) + ": expected 0xE0 (GIE, PEIE, TMR0IE)");
  }
  if (regs.tmr0l_reload != ref.tmr0l_reload) {
    warn("TMR0L reload is " + std::to_string(regs.tmr0l_reload) + ", expected 100");
  }
  return out;
}

bool has_fatal(const std::vector<Finding>& findings) {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity == Severity::Fatal; });
}

std::optional<std::uint8_t RegisterFile::*> field_by_name(std::string_view name) {
  static constexpr std::pair<std::string_view, std::uint8_t RegisterFile::*> kFields[] = {
      {"ADCON0", &RegisterFile::adcon0}, {"ADCON1", &RegisterFile::adcon1},
      {"ADCON2", &RegisterFile::adcon2}, {"T0CON", &RegisterFile::t0con},
      {"INTCON", &RegisterFile::intcon}, {"INTCON2", &RegisterFile::intcon2},
      {"INTCON3", &RegisterFile::intcon3}, {"TRISA", &RegisterFile::trisa},
      {"TRISB", &RegisterFile::trisb},   {"TMR0L", &RegisterFile::tmr0l_reload},
  };
  for (const auto& [n, field] : kFields) {
    if (n == name) return field;
  }
  return std::nullopt;
}

std::optional<std::vector<std::pair<std::string, std::string>>> decode_named(
    std::string_view reg, std::uint8_t value) {
  std::vector<std::pair<std::string, std::string>> out;
  if (reg == "ADCON0") {
    const auto f = decode_adcon0(value);
    out.emplace_back("channel", f.unimplemented
                                    ? std::to_string(f.channel) + " (unimplemented)"
                                    : "AN" + std::to_string(f.channel));
    out.emplace_back("go_done", flag(f.go_done));
    out.emplace_back("enabled", flag(f.enabled));
  } else if (reg == "ADCON1") {
    const auto f = decode_adcon1(value);
    out.emplace_back("vref_minus", f.vref_minus_external ? "AN2" : "VSS");
    out.emplace_back("vref_plus", f.vref_plus_external ? "AN3" : "VDD");
    std::string map;
    for (int k = kAnalogChannels - 1; k >= 0; --k) map.push_back(f.analog[k] ? 'A' : 'D');
    out.emplace_back("port_map", map + " (AN12..AN0)");
    out.emplace_back("analog_channels", std::to_string(f.analog_count()));
  } else if (reg == "ADCON2") {
    const auto f = decode_adcon2(value);
    out.emplace_back("justification", f.right_justified ? "right" : "left");
    out.emplace_back("acquisition", std::to_string(f.acquisition_tad) + "TAD");
    out.emplace_back("clock", std::string(to_string(f.clock_divider)));
  } else if (reg == "T0CON") {
    const auto f = decode_t0con(value);
    out.emplace_back("enabled", flag(f.enabled));
    out.emplace_back("mode", f.eight_bit_mode ? "8-bit" : "16-bit");
    out.emplace_back("prescaler", f.prescaler_assigned ? "assigned" : "bypassed");
    out.emplace_back("prescale", "1:" + std::to_string(f.prescale));
  } else if (reg == "INTCON") {
    const auto f = decode_intcon(value);
    out.emplace_back("gie", flag(f.gie));
    out.emplace_back("peie", flag(f.peie));
    out.emplace_back("tmr0ie", flag(f.tmr0ie));
    out.emplace_back("int0ie", flag(f.int0ie));
    out.emplace_back("rbie", flag(f.rbie));
    out.emplace_back("tmr0if", flag(f.tmr0if));
    out.emplace_back("int0if", flag(f.int0if));
    out.emplace_back("rbif", flag(f.rbif));
  } else if (reg == "TRISA" || reg == "TRISB") {
    std::string dirs;
    for (int k = 7; k >= 0; --k) dirs.push_back(bit(value, k) ? 'I' : 'O');
    out.emplace_back("direction", dirs + " (bit7..bit0)");
  } else if (reg == "TMR0L") {
    out.emplace_back("reload", std::to_string(value));
    out.emplace_back("counts_to_overflow", std::to_string(256 - value));
  } else {
    return std::nullopt;
  }
  return out;
}

}  // namespace hidsense::registers
