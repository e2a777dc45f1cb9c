/* TEMPLATE GENERATED TESTCASE FILE
Filename: CWE561_Dead_Code__unreachable_code_01.cpp
*/
#include "std_testcase.h"

namespace CWE561_Dead_Code__unreachable_code_01
{

#ifndef OMITBAD

void bad()
{
    return;
    /* FLAW: the code below can never run */
    printLine("unreachable");
}

#endif /* OMITBAD */

#ifndef OMITGOOD

static void good1()
{
    printLine("reachable");
}

void good()
{
    good1();
}

#endif /* OMITGOOD */

} /* close namespace */
