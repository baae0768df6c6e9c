// SPDX-License-Identifier: Apache-2.0
//
// Classfile parsing. Layout per the JVM specification, chapter 4.
#include "bcv/classfile.hpp"

#include <bit>
#include <cstring>

#include "bcv/error.hpp"

namespace bcv {

ElementValue ElementValue::of_string(std::string s) {
  ElementValue v;
  v.tag = 's';
  v.text = std::move(s);
  return v;
}

ElementValue ElementValue::of_int(std::int32_t i) {
  ElementValue v;
  v.tag = 'I';
  v.integer = i;
  return v;
}

ElementValue ElementValue::of_bool(bool b) {
  ElementValue v;
  v.tag = 'Z';
  v.integer = b ? 1 : 0;
  return v;
}

ElementValue ElementValue::of_array(std::vector<ElementValue> items) {
  ElementValue v;
  v.tag = '[';
  v.items = std::move(items);
  return v;
}

ElementValue ElementValue::of_annotation(AnnotationValue a) {
  ElementValue v;
  v.tag = '@';
  v.nested.push_back(std::move(a));
  return v;
}

bool operator==(const ElementValue& a, const ElementValue& b) {
  return a.tag == b.tag && a.integer == b.integer && a.real == b.real && a.text == b.text &&
         a.enum_const == b.enum_const && a.items == b.items && a.nested == b.nested;
}

std::optional<std::string> AnnotationValue::string_value() const {
  for (const auto& [name, value] : elements) {
    if (name == "value" && value.tag == 's') return value.text;
  }
  return std::nullopt;
}

std::optional<std::size_t> CodeAttribute::index_at(std::int32_t offset) const {
  std::size_t lo = 0, hi = instructions.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (static_cast<std::int32_t>(instructions[mid].offset) < offset) lo = mid + 1;
    else hi = mid;
  }
  if (lo < instructions.size() && static_cast<std::int32_t>(instructions[lo].offset) == offset)
    return lo;
  return std::nullopt;
}

const MethodInfo* ClassFile::find_method(std::string_view name, std::string_view descriptor) const {
  for (const auto& m : methods) {
    if (m.name == name && m.descriptor.text() == descriptor) return &m;
  }
  return nullptr;
}

const FieldInfo* ClassFile::find_field(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::string decode_modified_utf8(std::span<const std::uint8_t> in) {
  std::string out;
  auto put = [&out](std::uint32_t cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  };
  auto truncated = [] { return Error(ErrorCode::Truncated, "malformed modified UTF-8"); };
  // Decodes one 1-3 byte unit into a UTF-16 code unit.
  auto unit = [&](std::size_t& i) -> std::uint32_t {
    std::uint8_t b = in[i];
    if (b < 0x80 && b != 0) {
      i += 1;
      return b;
    }
    if ((b & 0xE0) == 0xC0) {
      if (i + 1 >= in.size()) throw truncated();
      std::uint32_t c = ((b & 0x1Fu) << 6) | (in[i + 1] & 0x3Fu);
      i += 2;
      return c;
    }
    if ((b & 0xF0) == 0xE0) {
      if (i + 2 >= in.size()) throw truncated();
      std::uint32_t c = ((b & 0x0Fu) << 12) | ((in[i + 1] & 0x3Fu) << 6) | (in[i + 2] & 0x3Fu);
      i += 3;
      return c;
    }
    throw truncated();
  };
  std::size_t i = 0;
  while (i < in.size()) {
    std::uint32_t c = unit(i);
    if (c >= 0xD800 && c <= 0xDBFF && i < in.size()) {
      std::size_t j = i;
      std::uint32_t low = unit(j);
      if (low >= 0xDC00 && low <= 0xDFFF) {
        put(0x10000 + ((c - 0xD800) << 10) + (low - 0xDC00));
        i = j;
        continue;
      }
    }
    put(c);
  }
  return out;
}

std::vector<std::uint8_t> encode_modified_utf8(std::string_view s) {
  std::vector<std::uint8_t> out;
  auto unit = [&out](std::uint32_t c) {
    if (c != 0 && c < 0x80) {
      out.push_back(static_cast<std::uint8_t>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<std::uint8_t>(0xC0 | (c >> 6)));
      out.push_back(static_cast<std::uint8_t>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<std::uint8_t>(0xE0 | (c >> 12)));
      out.push_back(static_cast<std::uint8_t>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<std::uint8_t>(0x80 | (c & 0x3F)));
    }
  };
  std::size_t i = 0;
  while (i < s.size()) {
    auto b = static_cast<std::uint8_t>(s[i]);
    std::uint32_t cp;
    std::size_t len;
    if (b < 0x80) { cp = b; len = 1; }
    else if ((b & 0xE0) == 0xC0) { cp = b & 0x1Fu; len = 2; }
    else if ((b & 0xF0) == 0xE0) { cp = b & 0x0Fu; len = 3; }
    else { cp = b & 0x07u; len = 4; }
    if (i + len > s.size()) throw Error(ErrorCode::PlanInconsistent, "invalid UTF-8 in name");
    for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<std::uint8_t>(s[i + k]) & 0x3Fu);
    i += len;
    if (cp >= 0x10000) {
      cp -= 0x10000;
      unit(0xD800 + (cp >> 10));
      unit(0xDC00 + (cp & 0x3FF));
    } else {
      unit(cp);
    }
  }
  return out;
}

namespace {

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u1() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint16_t u2() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>((bytes_[pos_] << 8) | bytes_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u4() {
    std::uint32_t hi = u2();
    return (hi << 16) | u2();
  }
  std::int32_t s4() { return static_cast<std::int32_t>(u4()); }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  void skip(std::size_t n) { take(n); }
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::Truncated, "unexpected end of data");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

enum CpTag : std::uint8_t {
  kUtf8 = 1, kInteger = 3, kFloat = 4, kLong = 5, kDouble = 6, kClass = 7, kString = 8,
  kFieldref = 9, kMethodref = 10, kInterfaceMethodref = 11, kNameAndType = 12,
  kMethodHandle = 15, kMethodType = 16, kDynamic = 17, kInvokeDynamic = 18, kModule = 19,
  kPackage = 20,
};

struct CpEntry {
  std::uint8_t tag = 0;  // 0 marks index 0 and the phantom slot after long/double
  std::uint16_t a = 0, b = 0;
  std::uint64_t raw = 0;
  std::string utf8;
};

class ConstantPool {
 public:
  void read(Reader& r) {
    std::uint16_t count = r.u2();
    entries_.assign(count == 0 ? 1 : count, CpEntry{});
    for (std::uint16_t i = 1; i < count; ++i) {
      CpEntry e;
      e.tag = r.u1();
      switch (e.tag) {
        case kUtf8: {
          std::uint16_t len = r.u2();
          e.utf8 = decode_modified_utf8(r.take(len));
          break;
        }
        case kInteger: case kFloat: e.raw = r.u4(); break;
        case kLong: case kDouble: {
          std::uint64_t hi = r.u4();
          e.raw = (hi << 32) | r.u4();
          break;
        }
        case kClass: case kString: case kMethodType: case kModule: case kPackage:
          e.a = r.u2();
          break;
        case kFieldref: case kMethodref: case kInterfaceMethodref: case kNameAndType:
        case kDynamic: case kInvokeDynamic:
          e.a = r.u2();
          e.b = r.u2();
          break;
        case kMethodHandle:
          e.a = r.u1();
          e.b = r.u2();
          break;
        default:
          throw Error(ErrorCode::BadCpIndex, "unknown constant-pool tag " + std::to_string(e.tag) +
                                                 " at index " + std::to_string(i));
      }
      bool wide = e.tag == kLong || e.tag == kDouble;
      entries_[i] = std::move(e);
      if (wide) ++i;
    }
  }

  const CpEntry& at(std::uint16_t index, std::uint8_t tag) const {
    if (index == 0 || index >= entries_.size() || entries_[index].tag != tag) {
      throw Error(ErrorCode::BadCpIndex, "constant-pool index " + std::to_string(index) +
                                             " does not hold tag " + std::to_string(tag));
    }
    return entries_[index];
  }
  const CpEntry& any(std::uint16_t index) const {
    if (index == 0 || index >= entries_.size() || entries_[index].tag == 0) {
      throw Error(ErrorCode::BadCpIndex, "invalid constant-pool index " + std::to_string(index));
    }
    return entries_[index];
  }

  const std::string& utf8(std::uint16_t i) const { return at(i, kUtf8).utf8; }
  const std::string& class_name(std::uint16_t i) const { return utf8(at(i, kClass).a); }

  std::pair<std::string, std::string> name_and_type(std::uint16_t i) const {
    const auto& e = at(i, kNameAndType);
    return {utf8(e.a), utf8(e.b)};
  }

  MemberRef member(std::uint16_t i, std::uint8_t tag) const {
    const auto& e = at(i, tag);
    auto [name, desc] = name_and_type(e.b);
    return MemberRef{class_name(e.a), std::move(name), std::move(desc), tag == kInterfaceMethodref};
  }

  MemberRef method(std::uint16_t i) const {
    const auto& e = any(i);
    if (e.tag != kMethodref && e.tag != kInterfaceMethodref) {
      throw Error(ErrorCode::BadCpIndex, "index " + std::to_string(i) + " is not a method ref");
    }
    return member(i, e.tag);
  }

  ConstantValue loadable(std::uint16_t i) const {
    const auto& e = any(i);
    switch (e.tag) {
      case kInteger: return ConstantValue::of_int(static_cast<std::int32_t>(e.raw));
      case kFloat: return ConstantValue::of_float(std::bit_cast<float>(static_cast<std::uint32_t>(e.raw)));
      case kLong: return ConstantValue::of_long(static_cast<std::int64_t>(e.raw));
      case kDouble: return ConstantValue::of_double(std::bit_cast<double>(e.raw));
      case kString: return ConstantValue::of_string(utf8(e.a));
      case kClass: return ConstantValue::of_class(utf8(e.a));
      default:
        throw Error(ErrorCode::Unsupported,
                    "ldc of constant-pool tag " + std::to_string(e.tag) + " is not supported");
    }
  }

  std::int64_t integer(std::uint16_t i) const {
    const auto& e = any(i);
    if (e.tag != kInteger && e.tag != kLong) throw Error(ErrorCode::BadCpIndex, "expected integer constant");
    return e.tag == kInteger ? static_cast<std::int32_t>(e.raw) : static_cast<std::int64_t>(e.raw);
  }
  double real(std::uint16_t i) const {
    const auto& e = any(i);
    if (e.tag == kFloat) return std::bit_cast<float>(static_cast<std::uint32_t>(e.raw));
    if (e.tag == kDouble) return std::bit_cast<double>(e.raw);
    throw Error(ErrorCode::BadCpIndex, "expected floating constant");
  }

 private:
  std::vector<CpEntry> entries_;
};

std::string descriptor_to_binary_name(const std::string& desc) {
  if (desc.size() >= 2 && desc.front() == 'L' && desc.back() == ';') {
    return dotted_name(desc.substr(1, desc.size() - 2));
  }
  return desc;
}

AnnotationValue read_annotation(Reader& r, const ConstantPool& cp);

ElementValue read_element(Reader& r, const ConstantPool& cp) {
  ElementValue v;
  v.tag = static_cast<char>(r.u1());
  switch (v.tag) {
    case 'B': case 'C': case 'I': case 'S': case 'Z': case 'J':
      v.integer = cp.integer(r.u2());
      break;
    case 'D': case 'F':
      v.real = cp.real(r.u2());
      break;
    case 's':
      v.text = cp.utf8(r.u2());
      break;
    case 'e':
      v.text = cp.utf8(r.u2());
      v.enum_const = cp.utf8(r.u2());
      break;
    case 'c':
      v.text = cp.utf8(r.u2());
      break;
    case '@':
      v.nested.push_back(read_annotation(r, cp));
      break;
    case '[': {
      std::uint16_t n = r.u2();
      for (std::uint16_t i = 0; i < n; ++i) v.items.push_back(read_element(r, cp));
      break;
    }
    default:
      throw Error(ErrorCode::BadCpIndex, std::string("unknown element value tag '") + v.tag + "'");
  }
  return v;
}

AnnotationValue read_annotation(Reader& r, const ConstantPool& cp) {
  AnnotationValue a;
  a.type = descriptor_to_binary_name(cp.utf8(r.u2()));
  std::uint16_t n = r.u2();
  for (std::uint16_t i = 0; i < n; ++i) {
    std::string name = cp.utf8(r.u2());
    a.elements.emplace_back(std::move(name), read_element(r, cp));
  }
  return a;
}

std::vector<AnnotationValue> read_annotation_list(std::span<const std::uint8_t> data,
                                                  const ConstantPool& cp) {
  Reader r(data);
  std::vector<AnnotationValue> out;
  std::uint16_t n = r.u2();
  for (std::uint16_t i = 0; i < n; ++i) out.push_back(read_annotation(r, cp));
  return out;
}

std::vector<RawInstruction> decode_code(std::span<const std::uint8_t> code, const ConstantPool& cp) {
  std::vector<RawInstruction> out;
  Reader r(code);
  while (!r.done()) {
    RawInstruction ins;
    const auto start = static_cast<std::int32_t>(r.pos());
    ins.offset = static_cast<std::uint32_t>(start);
    std::uint8_t byte = r.u1();
    if (byte >= kOpcodeCount) {
      throw Error(ErrorCode::Unsupported, "unknown opcode " + std::to_string(byte), "offset " + std::to_string(start));
    }
    auto raw = static_cast<Opcode>(byte);
    bool wide = false;
    if (raw == Opcode::WIDE) {
      wide = true;
      std::uint8_t next = r.u1();
      if (next >= kOpcodeCount) throw Error(ErrorCode::Unsupported, "unknown opcode after wide");
      raw = static_cast<Opcode>(next);
    }
    ins.op = canonical_opcode(raw);
    switch (operand_format(raw)) {
      case OperandFormat::None:
        break;
      case OperandFormat::Local:
        ins.local = wide ? r.u2() : r.u1();
        break;
      case OperandFormat::ShortLocal:
        ins.local = short_local_form(raw)->slot;
        break;
      case OperandFormat::Byte:
        ins.immediate = raw == Opcode::NEWARRAY ? r.u1() : static_cast<std::int8_t>(r.u1());
        break;
      case OperandFormat::Short:
        ins.immediate = static_cast<std::int16_t>(r.u2());
        break;
      case OperandFormat::Ldc:
        ins.constant = cp.loadable(r.u1());
        break;
      case OperandFormat::LdcWide:
        ins.constant = cp.loadable(r.u2());
        break;
      case OperandFormat::Iinc:
        if (wide) {
          ins.local = r.u2();
          ins.immediate = static_cast<std::int16_t>(r.u2());
        } else {
          ins.local = r.u1();
          ins.immediate = static_cast<std::int8_t>(r.u1());
        }
        break;
      case OperandFormat::Branch:
        ins.targets.push_back(start + static_cast<std::int16_t>(r.u2()));
        break;
      case OperandFormat::BranchWide:
        ins.targets.push_back(start + r.s4());
        break;
      case OperandFormat::TableSwitch: {
        while (r.pos() % 4 != 0) r.u1();
        ins.targets.push_back(start + r.s4());
        std::int32_t low = r.s4(), high = r.s4();
        if (high < low) throw Error(ErrorCode::Truncated, "tableswitch high < low");
        for (std::int64_t k = low; k <= high; ++k) {
          ins.keys.push_back(static_cast<std::int32_t>(k));
          ins.targets.push_back(start + r.s4());
        }
        break;
      }
      case OperandFormat::LookupSwitch: {
        while (r.pos() % 4 != 0) r.u1();
        ins.targets.push_back(start + r.s4());
        std::int32_t n = r.s4();
        if (n < 0) throw Error(ErrorCode::Truncated, "negative lookupswitch count");
        for (std::int32_t k = 0; k < n; ++k) {
          ins.keys.push_back(r.s4());
          ins.targets.push_back(start + r.s4());
        }
        break;
      }
      case OperandFormat::Field:
        ins.member = cp.member(r.u2(), kFieldref);
        break;
      case OperandFormat::Method:
        ins.member = cp.method(r.u2());
        break;
      case OperandFormat::InterfaceMethod:
        ins.member = cp.member(r.u2(), kInterfaceMethodref);
        r.u1();
        r.u1();
        break;
      case OperandFormat::Dynamic: {
        const auto& e = cp.at(r.u2(), kInvokeDynamic);
        auto [name, desc] = cp.name_and_type(e.b);
        ins.member = MemberRef{"", std::move(name), std::move(desc), false};
        ins.immediate = e.a;
        r.u2();
        break;
      }
      case OperandFormat::Class:
        ins.class_name = cp.class_name(r.u2());
        break;
      case OperandFormat::MultiArray:
        ins.class_name = cp.class_name(r.u2());
        ins.immediate = r.u1();
        break;
      case OperandFormat::Wide:
        break;
    }
    out.push_back(std::move(ins));
  }
  return out;
}

struct AttributeView {
  std::string name;
  std::span<const std::uint8_t> data;
};

std::vector<AttributeView> read_attributes(Reader& r, const ConstantPool& cp) {
  std::vector<AttributeView> out;
  std::uint16_t n = r.u2();
  for (std::uint16_t i = 0; i < n; ++i) {
    std::string name = cp.utf8(r.u2());
    std::uint32_t len = r.u4();
    out.push_back({std::move(name), r.take(len)});
  }
  return out;
}

CodeAttribute read_code(std::span<const std::uint8_t> data, const ConstantPool& cp) {
  Reader r(data);
  CodeAttribute code;
  code.max_stack = r.u2();
  code.max_locals = r.u2();
  code.code_length = r.u4();
  code.instructions = decode_code(r.take(code.code_length), cp);
  std::uint16_t n = r.u2();
  for (std::uint16_t i = 0; i < n; ++i) {
    ExceptionEntry e;
    e.start = r.u2();
    e.end = r.u2();
    e.handler = r.u2();
    std::uint16_t type = r.u2();
    if (type != 0) e.catch_type = cp.class_name(type);
    code.exception_table.push_back(std::move(e));
  }
  for (const auto& attr : read_attributes(r, cp)) {
    if (attr.name == "LocalVariableTable") {
      Reader lr(attr.data);
      std::uint16_t count = lr.u2();
      for (std::uint16_t i = 0; i < count; ++i) {
        lr.u2();  // start_pc
        lr.u2();  // length
        LocalName ln;
        ln.name = cp.utf8(lr.u2());
        ln.descriptor = cp.utf8(lr.u2());
        ln.slot = lr.u2();
        JType::parse(ln.descriptor);
        code.local_names.push_back(std::move(ln));
      }
    }
    // StackMapTable, LineNumberTable and the rest are not needed downstream.
  }
  for (const auto& ins : code.instructions) {
    for (auto t : ins.targets) {
      if (!code.index_at(t)) {
        throw Error(ErrorCode::Truncated, "branch target " + std::to_string(t) + " is not an instruction boundary",
                    "offset " + std::to_string(ins.offset));
      }
    }
  }
  return code;
}

}  // namespace

ClassFile parse_class(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (bytes.size() < 4 || r.u4() != 0xCAFEBABE) throw Error(ErrorCode::Magic, "not a classfile (bad magic)");
  ClassFile cf;
  cf.minor_version = r.u2();
  cf.major_version = r.u2();
  if (cf.major_version < kMinMajorVersion || cf.major_version > kMaxMajorVersion) {
    throw Error(ErrorCode::Unsupported, "classfile version " + std::to_string(cf.major_version) +
                                            " outside accepted range 49-65");
  }
  ConstantPool cp;
  cp.read(r);
  cf.access = r.u2();
  cf.this_class = cp.class_name(r.u2());
  std::uint16_t super = r.u2();
  if (super != 0) cf.super_class = cp.class_name(super);
  std::uint16_t ninterfaces = r.u2();
  for (std::uint16_t i = 0; i < ninterfaces; ++i) cf.interfaces.push_back(cp.class_name(r.u2()));

  std::uint16_t nfields = r.u2();
  for (std::uint16_t i = 0; i < nfields; ++i) {
    FieldInfo f;
    f.access = r.u2();
    f.name = cp.utf8(r.u2());
    f.type = JType::parse(cp.utf8(r.u2()));
    if (f.type.is_void()) throw Error(ErrorCode::BadDescriptor, "void field " + f.name);
    for (const auto& attr : read_attributes(r, cp)) {
      if (attr.name == "RuntimeVisibleAnnotations") f.annotations = read_annotation_list(attr.data, cp);
    }
    cf.fields.push_back(std::move(f));
  }

  std::uint16_t nmethods = r.u2();
  for (std::uint16_t i = 0; i < nmethods; ++i) {
    MethodInfo m;
    m.access = r.u2();
    m.name = cp.utf8(r.u2());
    m.descriptor = MethodDescriptor::parse(cp.utf8(r.u2()));
    for (const auto& attr : read_attributes(r, cp)) {
      if (attr.name == "Code") {
        try {
          m.code = read_code(attr.data, cp);
        } catch (const Error& e) {
          throw e.located(dotted_name(cf.this_class) + "." + m.name);
        }
      } else if (attr.name == "RuntimeVisibleAnnotations") {
        m.annotations = read_annotation_list(attr.data, cp);
      } else if (attr.name == "MethodParameters") {
        Reader pr(attr.data);
        std::uint8_t n = pr.u1();
        for (std::uint8_t k = 0; k < n; ++k) {
          std::uint16_t name = pr.u2();
          pr.u2();  // access flags
          m.parameter_names.push_back(name == 0 ? std::string() : cp.utf8(name));
        }
      }
    }
    bool bodiless = m.is_abstract() || m.is_native();
    if (bodiless && m.code) throw Error(ErrorCode::BadDescriptor, "abstract/native method with code: " + m.name);
    if (!bodiless && !m.code) throw Error(ErrorCode::Truncated, "method without Code attribute: " + m.name);
    cf.methods.push_back(std::move(m));
  }
  for (const auto& attr : read_attributes(r, cp)) {
    if (attr.name == "RuntimeVisibleAnnotations") cf.class_annotations = read_annotation_list(attr.data, cp);
  }
  return cf;
}

std::vector<AnnotationValue> read_annotations(const MethodInfo& m) {
  std::vector<AnnotationValue> out;
  for (const auto& a : m.annotations) {
    bool container = a.elements.size() == 1 && a.elements[0].first == "value" &&
                     a.elements[0].second.tag == '[' && !a.elements[0].second.items.empty();
    if (container) {
      for (const auto& item : a.elements[0].second.items) {
        if (item.tag != '@') {
          container = false;
          break;
        }
      }
    }
    if (!container) {
      out.push_back(a);
      continue;
    }
    for (const auto& item : a.elements[0].second.items) out.push_back(item.nested.front());
  }
  return out;
}

}  // namespace bcv
